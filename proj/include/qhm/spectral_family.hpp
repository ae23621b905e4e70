#pragma once

// Resolutions of the identity as finite step functions. E(lambda) is the
// orthogonal spectral family of a Hermitian K; X(lambda) = G^{-1/2} E(lambda)
// G^{1/2} is the (generally oblique) family of a quasi-Hermitian A with
// K = G^{1/2} A G^{-1/2}. Both are right-continuous by the evaluation rule
// at(lambda) = cumulative projector of the largest threshold <= lambda.

#include <utility>
#include <vector>

#include "qhm/metric_lattice.hpp"
#include "qhm/operator_core.hpp"

namespace qhm {

struct SpectralFamily {
  std::vector<double> thresholds;   // distinct, ascending
  std::vector<Operator> projectors;  // cumulative E_k, Hermitian
  std::vector<Index> ranks;

  Index dim() const { return projectors.empty() ? 0 : projectors.front().dim(); }
  Matrix at(double lambda) const;
};

struct XFamily {
  std::vector<double> thresholds;
  std::vector<Operator> x_projectors;  // cumulative X_k
  MetricOperator metric;
  double reconstruction_residual = 0;  // ||A - sum lambda_k (X_k - X_{k-1})||_F / ||A||_F

  Index dim() const { return metric.dim(); }
  Matrix at(double lambda) const;
  /// Jump X_k - X_{k-1}.
  Matrix step(size_t k) const;
};

SpectralFamily spectral_family(const Operator& h, double tol = kDefaultTol);

XFamily x_family(const Operator& a, const MetricOperator& m, double tol = kDefaultTol);

struct XSampleCheck {
  Complex below;               // f(lambda) below the first threshold (0)
  Complex top_gap;             // f(lambda_max) - <xi, eta>
  double total_variation = 0;  // sum_k |<(X_k - X_{k-1}) xi, eta>|
  double variation_bound = 0;  // ||G^{1/2} xi|| ||G^{-1/2} eta||
  double reconstruction_residual = 0;  // |<A xi, eta> - sum_k lambda_k <P_k xi, eta>| / (||A|| ||xi|| ||eta||)
  bool limits_ok = true;
  bool variation_ok = true;
  bool reconstruction_ok = true;
};

struct XPropertiesReport {
  std::vector<XSampleCheck> samples;
  bool right_continuous = true;  // structural, see SpectralFamily::at
  Index variation_violations = 0;
  double max_reconstruction_residual = 0;
  double max_variation_ratio = 0;  // total_variation / variation_bound
  bool passed = true;
};

XPropertiesReport x_properties(const XFamily& xf, const Operator& a,
                               const std::vector<std::pair<Vector, Vector>>& samples, double tol = kDefaultTol);

struct ScalarComponent {
  double lambda = 0;
  Operator projector;  // P_k = X_k - X_{k-1}
};

std::vector<ScalarComponent> scalar_type_decomposition(const Operator& a, const MetricOperator& m,
                                                       double tol = kDefaultTol);

/// <X(lambda) xi, eta> evaluated at every threshold, for plotting.
std::vector<std::pair<double, Complex>> x_sample_path(const XFamily& xf, const Vector& xi, const Vector& eta);

}  // namespace qhm
