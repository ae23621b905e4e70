#pragma once

// Metric operators and the norms of the lattice of Hilbert spaces generated
// by a single metric G: H, H(G), H(G^-1), H(R_G), H(R_G^-1), H(R_{G^-1}) and
// H(R_{G^-1}^-1), with R_G = I + G. At finite dimension all of these are the
// same set, so only the norms are materialized.

#include <functional>
#include <string>
#include <vector>

#include "qhm/operator_core.hpp"

namespace qhm {

class MetricOperator {
 public:
  const Operator& G() const noexcept { return g_; }
  const Operator& G_half() const noexcept { return g_half_; }
  const Operator& G_invhalf() const noexcept { return g_invhalf_; }
  double eig_min() const noexcept { return spectrum_.minCoeff(); }
  double eig_max() const noexcept { return spectrum_.maxCoeff(); }
  Index dim() const noexcept { return g_.dim(); }

  /// Orthonormal eigenbasis of G and its (positive) spectrum.
  const Matrix& basis() const noexcept { return basis_; }
  const Eigen::VectorXd& spectrum() const noexcept { return spectrum_; }

  /// f(G) through the spectral decomposition.
  Matrix function(const std::function<double(double)>& f) const;
  Matrix inverse() const;

  friend MetricOperator make_metric(const Operator& g, double tol);

 private:
  MetricOperator() = default;

  Operator g_;
  Operator g_half_;
  Operator g_invhalf_;
  Matrix basis_;
  Eigen::VectorXd spectrum_;
};

/// Validates G (Hermitian, strictly positive) and caches G^{+-1/2}.
MetricOperator make_metric(const Operator& g, double tol = kDefaultTol);

/// <xi, eta>_G = <G xi, eta> = eta^dagger G xi.
Complex g_inner(const MetricOperator& m, const Vector& xi, const Vector& eta);

/// R_G = I + G.
Operator riesz_operator(const MetricOperator& m);

struct LatticeNorms {
  double plain = 0;      // H
  double g = 0;          // H(G)
  double g_inv = 0;      // H(G^-1)
  double rg = 0;         // H(R_G), the projective norm
  double rg_inv = 0;     // H(R_G^-1), the inductive norm
  double rginv = 0;      // H(R_{G^-1})
  double rginv_inv = 0;  // H(R_{G^-1}^-1)
};

LatticeNorms lattice_norms(const MetricOperator& m, const Vector& xi);

struct LatticeSampleCheck {
  LatticeNorms norms;
  double projective_residual = 0;   // |rg^2 - plain^2 - g^2| / rg^2
  double duality_sample_sup = 0;    // sup over samples eta of |<xi,eta>| / ||eta||_{R_G}
  double duality_slack = 1;         // rg_inv / duality_sample_sup (>= 1)
  double duality_witness_residual = 0;  // relative gap at eta = R_G^-1 xi
  double unitarity_residual = 0;    // | ||R_G^{1/2} xi|| - rg | / rg
  bool chain_holds = true;          // g <= plain <= g_inv after rescaling
  bool passed = true;
};

struct LatticeReport {
  double tolerance = 0;
  double chain_scale = 1;  // G is multiplied by this before the chain check
  std::vector<LatticeSampleCheck> samples;
  double max_projective_residual = 0;
  double max_unitarity_residual = 0;
  double max_duality_witness_residual = 0;
  double max_duality_slack = 1;
  bool passed = true;
  std::vector<std::string> failures;
};

LatticeReport verify_lattice(const MetricOperator& m, const std::vector<Vector>& samples,
                             double tol = kDefaultTol);

}  // namespace qhm
