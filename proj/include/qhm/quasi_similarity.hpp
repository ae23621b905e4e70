#pragma once

// Intertwining operators (T A = B T), quasi-affinity diagnostics and the
// point-spectrum consequences of (mutual) quasi-similarity.
//
// At finite dimension every injective T is invertible, so quasi-similarity
// collapses to similarity. The reports therefore expose the singular-value
// profile of T: a tiny min_sv is the finite shadow of an unbounded inverse.
// Continuous and residual spectra are empty here and are not computed.

#include <string>
#include <vector>

#include "qhm/operator_core.hpp"

namespace qhm {

/// Default eigenvalue matching radius, relative: |z - w| <= r (1 + |z|).
inline constexpr double kDefaultMatchTol = 1e-7;

struct IntertwinerReport {
  double residual = 0;  // ||T A - B T||_F / (||T||_F (||A||_F + ||B||_F) + eps)
  std::vector<double> singular_values;  // descending
  double min_sv = 0;
  Index numerical_rank = 0;
  bool quasi_affinity = false;
  double bounded_inverse_proxy = 0;  // min_sv
  double condition = 0;              // max_sv / min_sv, inf when singular
};

struct SpectralPair {
  Complex lambda_a;
  Complex lambda_b;
  double distance = 0;
  Index m_a = 0;
  Index m_b = 0;
};

struct SpectralMatch {
  std::vector<SpectralPair> pairs;
  std::vector<Complex> unmatched_a;
  std::vector<Complex> unmatched_b;
  double match_tol = kDefaultMatchTol;

  /// sigma_p(A) in sigma_p(B) with m_A <= m_B.
  bool inclusion() const;
  /// Equal point spectra with equal multiplicities.
  bool equality() const;
};

struct PushedEigenvector {
  Complex lambda;
  double image_norm = 0;  // ||T xi|| for unit xi
  double residual = 0;    // ||B T xi - lambda T xi|| / ||T xi||
  bool ok = true;
};

struct PushReport {
  double intertwining_residual = 0;
  std::vector<PushedEigenvector> pushed;
  std::vector<Complex> annihilated;  // eigenvalues whose eigenvector T kills
  double max_residual = 0;
  bool passed = true;
};

struct MutualQsReport {
  IntertwinerReport ab;  // T_ab A = B T_ab
  IntertwinerReport ba;  // T_ba B = A T_ba
  SpectralMatch spectra;
  bool intertwinings_hold = false;
  bool quasi_affinities = false;
  bool point_spectra_equal = false;
  bool both_normal = false;
  bool unitary_equivalence = true;  // only asserted when both_normal
  bool bounded_inverses = false;
  bool full_spectra_equal = true;  // only asserted when bounded_inverses
  bool passed = false;
  std::vector<std::string> failures;
  std::string note = "continuous and residual spectra are empty at finite dimension and not computed";
};

IntertwinerReport verify_intertwining(const Operator& a, const Operator& b, const Operator& t,
                                      double tol = kDefaultTol);

/// Greedy nearest matching of eigenvalue clusters of A and B.
SpectralMatch spectral_comparison(const Operator& a, const Operator& b, double tol = kDefaultMatchTol);

/// Maps each eigenvector of A through T and checks it is an eigenvector of B
/// for the same eigenvalue. Throws IntertwiningViolated when T A != B T.
PushReport push_eigenvectors(const Operator& a, const Operator& b, const Operator& t, double tol = kDefaultTol);

MutualQsReport mutual_qs_check(const Operator& a, const Operator& b, const Operator& t_ab, const Operator& t_ba,
                               double tol = kDefaultTol, double match_tol = kDefaultMatchTol);

/// ||(A - z)^-1||_2 per grid point; +infinity on the spectrum.
std::vector<double> resolvent_norms(const Operator& a, const std::vector<Complex>& grid);

bool is_normal(const Operator& a, double tol = kDefaultTol);

}  // namespace qhm
