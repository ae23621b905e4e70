#pragma once

// Quasi-Hermitian operators: detection, positive metrics solving
// G A = A^dagger G, the quasi-self-adjoint transform K = G^{1/2} A G^{-1/2},
// the G-adjoint S^# = G^{-1} S^dagger G, the minimal B_0, and the indefinite
// (Krein / pseudo-Hermitian) counterparts.

#include <string>
#include <utility>
#include <vector>

#include "qhm/metric_lattice.hpp"
#include "qhm/operator_core.hpp"

namespace qhm {

/// Eigenvector matrices with cond above this produce an IllConditioned warning.
inline constexpr double kIllConditionedThreshold = 1e8;

/// Eigenvalues with tol < |Im z| / (1 + |z|) <= this factor * tol are reported
/// as borderline instead of failing outright.
inline constexpr double kBorderlineRealityFactor = 10.0;

struct EigenCluster {
  Complex value;  // first member of the cluster
  Index begin = 0;  // first column in MetricSolution::eigvec_matrix
  Index size = 0;
};

struct MetricSolution {
  MetricOperator canonical;
  Operator eigvec_matrix;  // S, with A = S diag(eigenvalues) S^-1
  Vector eigenvalues;
  /// Admissible metrics are S^-dagger D S^-1 with D Hermitian positive definite
  /// and block diagonal on these clusters.
  std::vector<EigenCluster> freedom;
  double residual = 0;           // ||G A - A^dagger G||_F
  double relative_residual = 0;  // quasi_hermiticity_residual(A, G)
  double scale = 1;              // canonical.G = scale * (S S^dagger)^-1
  double vector_condition = 1;
  std::vector<std::string> warnings;
};

struct KreinStructure {
  Operator J;
  Index n_plus = 0;
  Index n_minus = 0;
  Operator P_plus;
  Operator P_minus;
};

struct Signature {
  Index positive = 0;
  Index negative = 0;
  Index zero = 0;
  friend bool operator==(const Signature&, const Signature&) = default;
};

struct PseudoMetric {
  Operator T;
  Signature signature;
  double residual = 0;  // quasi_hermiticity_residual(A, T)
};

/// ||G A - A^dagger G||_F / (||G||_F ||A||_F + eps).
double quasi_hermiticity_residual(const Operator& a, const Operator& g);

MetricSolution solve_metric(const Operator& a, double tol = kDefaultTol);

/// G_D = scale * S^-dagger D S^-1 for per-cluster Hermitian blocks D.
Operator metric_from_freedom(const MetricSolution& solution, const std::vector<Matrix>& blocks);

struct QuasiSelfAdjointTransform {
  Operator K;
  double metric_residual = 0;       // quasi_hermiticity_residual(A, G)
  double hermiticity_residual = 0;  // ||K - K^dagger||_F / ||K||_F
  bool forced = false;              // precondition failed and force was set
};

/// K = G^{1/2} A G^{-1/2}. Throws NotQuasiHermitian unless force is set.
QuasiSelfAdjointTransform quasi_sa_transform(const Operator& a, const MetricOperator& m,
                                             double tol = kDefaultTol, bool force = false);

/// S^# = G^-1 S^dagger G.
Operator sharp_adjoint(const Operator& s, const MetricOperator& m);

/// B_0 = G A G^-1, the finite-dimensional value of (A^sharp)^dagger.
Operator minimal_b0(const Operator& a, const MetricOperator& m);

/// Validates the fundamental symmetry J and tests J A = A^dagger J.
std::pair<bool, KreinStructure> krein_check(const Operator& a, const Operator& j, double tol = kDefaultTol);

/// Hermitian invertible T with T A = A^dagger T, built pairwise on conjugate
/// eigenvalues. Positive definite exactly when the spectrum is real.
PseudoMetric solve_pseudo_metric(const Operator& a, double tol = kDefaultTol);

/// Inertia of a Hermitian matrix, eigenvalues within tol * ||H||_2 of zero
/// counted as zero.
Signature inertia(const Operator& h, double tol = kDefaultTol);

}  // namespace qhm
