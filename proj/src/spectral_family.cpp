#include "qhm/spectral_family.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qhm/quasi_hermitian.hpp"

namespace qhm {

namespace {

Matrix cumulative_at(const std::vector<double>& thresholds, const std::vector<Operator>& family, Index n,
                     double lambda) {
  // largest k with thresholds[k] <= lambda; zero below the first threshold
  const auto it = std::upper_bound(thresholds.begin(), thresholds.end(), lambda);
  if (it == thresholds.begin()) return Matrix::Zero(n, n);
  return family[static_cast<size_t>(std::distance(thresholds.begin(), it) - 1)].matrix();
}

}  // namespace

Matrix SpectralFamily::at(double lambda) const { return cumulative_at(thresholds, projectors, dim(), lambda); }

Matrix XFamily::at(double lambda) const { return cumulative_at(thresholds, x_projectors, dim(), lambda); }

Matrix XFamily::step(size_t k) const {
  if (k == 0) return x_projectors.front().matrix();
  return x_projectors[k].matrix() - x_projectors[k - 1].matrix();
}

SpectralFamily spectral_family(const Operator& h, double tol) {
  const Eigensystem es = eig_hermitian(h, tol);
  const Index n = h.dim();
  const Eigen::VectorXd l = es.eigenvalues.real();

  SpectralFamily out;
  Index begin = 0;
  while (begin < n) {
    Index end = begin + 1;
    while (end < n && l(end) - l(begin) <= tol * (1.0 + std::abs(l(begin)))) ++end;
    out.thresholds.push_back(l.segment(begin, end - begin).mean());
    const auto v = es.right_vectors.leftCols(end);
    Matrix e = v * v.adjoint();
    e = 0.5 * (e + e.adjoint()).eval();
    out.projectors.emplace_back(std::move(e), "E");
    out.ranks.push_back(end);
    begin = end;
  }
  return out;
}

XFamily x_family(const Operator& a, const MetricOperator& m, double tol) {
  const QuasiSelfAdjointTransform tr = quasi_sa_transform(a, m, tol, /*force=*/true);
  if (tr.hermiticity_residual > tol) {
    std::ostringstream msg;
    msg << "K = G^(1/2) A G^(-1/2) has Hermiticity residual " << tr.hermiticity_residual << " above " << tol;
    throw Error(ErrorKind::NotQuasiSelfAdjoint, msg.str());
  }
  const Matrix k = 0.5 * (tr.K.matrix() + tr.K.matrix().adjoint());
  const SpectralFamily sf = spectral_family(Operator(k, "K"), tol);

  XFamily out{sf.thresholds, {}, m, 0};
  const Matrix& gh = m.G_half().matrix();
  const Matrix& gih = m.G_invhalf().matrix();
  for (const auto& e : sf.projectors) out.x_projectors.emplace_back(gih * e.matrix() * gh, "X");

  Matrix rebuilt = Matrix::Zero(a.dim(), a.dim());
  for (size_t i = 0; i < out.thresholds.size(); ++i) rebuilt += out.thresholds[i] * out.step(i);
  const double scale = a.matrix().norm();
  out.reconstruction_residual = scale == 0.0 ? rebuilt.norm() : (a.matrix() - rebuilt).norm() / scale;
  return out;
}

XPropertiesReport x_properties(const XFamily& xf, const Operator& a,
                               const std::vector<std::pair<Vector, Vector>>& samples, double tol) {
  XPropertiesReport report;
  if (samples.empty()) {
    report.passed = false;
    return report;
  }
  const double a_norm = spectral_norm(a.matrix());
  const Matrix& gh = xf.metric.G_half().matrix();
  const Matrix& gih = xf.metric.G_invhalf().matrix();
  std::vector<Matrix> steps;
  for (size_t k = 0; k < xf.thresholds.size(); ++k) steps.push_back(xf.step(k));
  const double below_point = xf.thresholds.front() - 1.0;
  const double top_point = xf.thresholds.back();

  for (const auto& [xi, eta] : samples) {
    if (xi.size() != xf.dim() || eta.size() != xf.dim())
      throw Error(ErrorKind::DimensionMismatch, "x_properties sample has the wrong dimension");
    XSampleCheck c;
    const double scale = xi.norm() * eta.norm();
    c.variation_bound = (gh * xi).norm() * (gih * eta).norm();

    c.below = eta.dot(xf.at(below_point) * xi);
    c.top_gap = eta.dot(xf.at(top_point) * xi) - eta.dot(xi);
    c.limits_ok = std::abs(c.below) <= tol * scale && std::abs(c.top_gap) <= tol * std::max(scale, c.variation_bound);

    Complex integral = 0;
    for (size_t k = 0; k < steps.size(); ++k) {
      const Complex jump = eta.dot(steps[k] * xi);
      c.total_variation += std::abs(jump);
      integral += xf.thresholds[k] * jump;
    }
    c.variation_ok = c.total_variation <= c.variation_bound + tol * std::max(1.0, c.variation_bound);

    const Complex direct = eta.dot(a.matrix() * xi);
    const double denom = a_norm * scale;
    c.reconstruction_residual = denom == 0.0 ? std::abs(direct - integral) : std::abs(direct - integral) / denom;
    c.reconstruction_ok = c.reconstruction_residual <= tol;

    if (!c.variation_ok) ++report.variation_violations;
    report.max_reconstruction_residual = std::max(report.max_reconstruction_residual, c.reconstruction_residual);
    if (c.variation_bound > 0.0)
      report.max_variation_ratio = std::max(report.max_variation_ratio, c.total_variation / c.variation_bound);
    if (!(c.limits_ok && c.variation_ok && c.reconstruction_ok)) report.passed = false;
    report.samples.push_back(c);
  }
  return report;
}

std::vector<ScalarComponent> scalar_type_decomposition(const Operator& a, const MetricOperator& m, double tol) {
  const XFamily xf = x_family(a, m, tol);
  std::vector<ScalarComponent> out;
  for (size_t k = 0; k < xf.thresholds.size(); ++k) out.push_back({xf.thresholds[k], Operator(xf.step(k), "P")});
  return out;
}

std::vector<std::pair<double, Complex>> x_sample_path(const XFamily& xf, const Vector& xi, const Vector& eta) {
  std::vector<std::pair<double, Complex>> path;
  for (size_t k = 0; k < xf.thresholds.size(); ++k)
    path.emplace_back(xf.thresholds[k], eta.dot(xf.x_projectors[k].matrix() * xi));
  return path;
}

}  // namespace qhm
