#include "qhm/metric_lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qhm {

namespace {

void require_dim(const MetricOperator& m, const Vector& v, const char* what) {
  if (v.size() != m.dim()) {
    std::ostringstream msg;
    msg << what << " has dimension " << v.size() << ", metric has " << m.dim();
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
}

double quadratic_form(const Matrix& a, const Vector& xi) {
  return std::max(0.0, xi.dot(a * xi).real());
}

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

}  // namespace

Matrix MetricOperator::function(const std::function<double(double)>& f) const {
  Eigen::VectorXd values(spectrum_.size());
  for (Index i = 0; i < spectrum_.size(); ++i) values(i) = f(spectrum_(i));
  Matrix out = basis_ * values.cast<Complex>().asDiagonal() * basis_.adjoint();
  return 0.5 * (out + out.adjoint());
}

Matrix MetricOperator::inverse() const {
  return function([](double x) { return 1.0 / x; });
}

MetricOperator make_metric(const Operator& g, double tol) {
  const Eigensystem es = eig_hermitian(g, tol);
  SquareRoots roots = sqrt_pd(g, es, tol);

  MetricOperator m;
  m.g_ = Operator(0.5 * (g.matrix() + g.matrix().adjoint()), g.label());
  m.g_half_ = std::move(roots.half);
  m.g_invhalf_ = std::move(roots.inv_half);
  m.basis_ = es.right_vectors;
  m.spectrum_ = es.eigenvalues.real();
  return m;
}

Complex g_inner(const MetricOperator& m, const Vector& xi, const Vector& eta) {
  require_dim(m, xi, "xi");
  require_dim(m, eta, "eta");
  return eta.dot(m.G().matrix() * xi);
}

Operator riesz_operator(const MetricOperator& m) {
  const Index n = m.dim();
  return Operator(Matrix::Identity(n, n) + m.G().matrix(), "R_G");
}

LatticeNorms lattice_norms(const MetricOperator& m, const Vector& xi) {
  require_dim(m, xi, "xi");
  const Index n = m.dim();
  const Vector coeff = m.basis().adjoint() * xi;
  auto spectral_form = [&](auto f) {
    double acc = 0.0;
    for (Index k = 0; k < n; ++k) acc += f(m.spectrum()(k)) * std::norm(coeff(k));
    return std::sqrt(std::max(0.0, acc));
  };

  LatticeNorms out;
  out.plain = xi.norm();
  out.g = (m.G_half().matrix() * xi).norm();
  out.g_inv = (m.G_invhalf().matrix() * xi).norm();
  out.rg = std::sqrt(quadratic_form(Matrix::Identity(n, n) + m.G().matrix(), xi));
  out.rg_inv = spectral_form([](double l) { return 1.0 / (1.0 + l); });
  out.rginv = spectral_form([](double l) { return 1.0 + 1.0 / l; });
  out.rginv_inv = spectral_form([](double l) { return l / (1.0 + l); });
  return out;
}

LatticeReport verify_lattice(const MetricOperator& m, const std::vector<Vector>& samples, double tol) {
  LatticeReport report;
  report.tolerance = tol;
  report.chain_scale = 1.0 / m.eig_max();
  if (samples.empty()) {
    report.passed = false;
    report.failures.push_back("no samples supplied");
    return report;
  }
  for (const auto& s : samples) require_dim(m, s, "sample");

  const Index n = m.dim();
  const Matrix riesz = Matrix::Identity(n, n) + m.G().matrix();
  const Matrix riesz_half = m.function([](double l) { return std::sqrt(1.0 + l); });
  const auto riesz_ldlt = riesz.ldlt();

  std::vector<double> rg_of(samples.size());
  for (size_t j = 0; j < samples.size(); ++j) rg_of[j] = std::sqrt(quadratic_form(riesz, samples[j]));

  const double sqrt_scale = std::sqrt(report.chain_scale);
  for (size_t i = 0; i < samples.size(); ++i) {
    const Vector& xi = samples[i];
    LatticeSampleCheck c;
    c.norms = lattice_norms(m, xi);
    const LatticeNorms& nm = c.norms;

    const double rg2 = nm.rg * nm.rg;
    c.projective_residual = rg2 == 0.0 ? 0.0 : std::abs(rg2 - nm.plain * nm.plain - nm.g * nm.g) / rg2;

    double sup = 0.0;
    for (size_t j = 0; j < samples.size(); ++j) {
      if (rg_of[j] == 0.0) continue;
      sup = std::max(sup, std::abs(samples[j].dot(xi)) / rg_of[j]);
    }
    c.duality_sample_sup = sup;
    c.duality_slack = sup == 0.0 ? (nm.rg_inv == 0.0 ? 1.0 : std::numeric_limits<double>::infinity())
                                 : nm.rg_inv / sup;

    const Vector witness = riesz_ldlt.solve(xi);
    const double witness_rg = std::sqrt(quadratic_form(riesz, witness));
    const double witness_value = witness_rg == 0.0 ? 0.0 : std::abs(witness.dot(xi)) / witness_rg;
    c.duality_witness_residual = relative_gap(witness_value, nm.rg_inv);

    c.unitarity_residual = relative_gap((riesz_half * xi).norm(), nm.rg);

    const double g_scaled = sqrt_scale * nm.g;
    const double g_inv_scaled = nm.g_inv / sqrt_scale;
    c.chain_holds = g_scaled <= nm.plain * (1.0 + tol) && nm.plain <= g_inv_scaled * (1.0 + tol);

    std::ostringstream why;
    if (c.projective_residual > tol) why << " projective identity residual " << c.projective_residual << ";";
    if (sup > nm.rg_inv * (1.0 + tol) + tol) why << " sampled duality supremum exceeds inductive norm;";
    if (c.duality_witness_residual > tol) why << " duality witness residual " << c.duality_witness_residual << ";";
    if (c.unitarity_residual > tol) why << " R_G^(1/2) unitarity residual " << c.unitarity_residual << ";";
    if (!c.chain_holds) why << " embedding chain g <= plain <= g_inv violated;";
    c.passed = why.str().empty();
    if (!c.passed) {
      report.passed = false;
      report.failures.push_back("sample " + std::to_string(i) + ":" + why.str());
    }

    report.max_projective_residual = std::max(report.max_projective_residual, c.projective_residual);
    report.max_unitarity_residual = std::max(report.max_unitarity_residual, c.unitarity_residual);
    report.max_duality_witness_residual = std::max(report.max_duality_witness_residual, c.duality_witness_residual);
    report.max_duality_slack = std::max(report.max_duality_slack, c.duality_slack);
    report.samples.push_back(c);
  }
  return report;
}

}  // namespace qhm
