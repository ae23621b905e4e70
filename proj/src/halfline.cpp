#include "qhm/halfline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace qhm {

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::optional<double> observed_order(double prev, double cur, Index n_prev, Index n_cur) {
  if (!(prev > 0.0) || !(cur > 0.0)) return std::nullopt;
  return std::log(prev / cur) / std::log(static_cast<double>(n_cur) / static_cast<double>(n_prev));
}

bool nonincreasing(double prev, double cur) { return cur <= prev || cur <= kTrendNoiseFloor; }

}  // namespace

double HalfLineSpec::default_box_length(double d) { return d == 0.0 ? 40.0 : 40.0 / std::abs(d); }

void HalfLineSpec::validate() const {
  std::ostringstream msg;
  if (!std::isfinite(d) || !std::isfinite(b)) msg << "d and b must be finite; ";
  if (!(box_length > 0.0) || !std::isfinite(box_length)) msg << "box_length must be positive; ";
  if (n < 16) msg << "n must be at least 16; ";
  if (scheme_order != 2) msg << "only scheme_order 2 is implemented; ";
  if (msg.str().empty() && !std::isfinite(spacing())) msg << "grid spacing is not finite; ";
  if (!msg.str().empty()) throw Error(ErrorKind::InvalidSpec, msg.str());
}

DiscretizedPair build_pair(const HalfLineSpec& spec) {
  spec.validate();
  const Index n = spec.n;
  const double h = spec.spacing();
  const double inv_h2 = 1.0 / (h * h);
  const Complex robin(spec.d, spec.b);
  const double root2 = std::sqrt(2.0);

  // ghost value xi_{-1} = xi_1 + 2 h c xi_0 from (xi_1 - xi_{-1}) / 2h = -c xi_0
  Matrix hm = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    hm(j, j) = 2.0 * inv_h2;
    if (j > 0) hm(j, j - 1) = -inv_h2;
    if (j + 1 < n) hm(j, j + 1) = -inv_h2;
  }
  hm(0, 0) = (2.0 - 2.0 * h * robin) * inv_h2;
  // W^{1/2} H W^{-1/2} turns the -2/h^2, -1/h^2 pair into -sqrt(2)/h^2 twice
  hm(0, 1) = -root2 * inv_h2;
  hm(1, 0) = -root2 * inv_h2;

  // (L xi)_j = (xi_{j+1} - xi_j) / h + c xi_j; row 0 is the discrete Robin
  // expression, xi_n = 0. Column 0 carries the W^{-1/2} weight.
  Matrix lm = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    lm(j, j) = robin - 1.0 / h;
    if (j + 1 < n) lm(j, j + 1) = 1.0 / h;
  }
  lm.col(0) *= root2;

  Matrix gm = lm.adjoint() * lm;
  return {Operator(std::move(hm), "H"), Operator(std::move(gm), "G"), Operator(std::move(lm), "L"), h};
}

std::pair<Operator, Operator> export_operators(const DiscretizedPair& pair) { return {pair.H, pair.G_raw}; }

std::pair<double, double> quasi_hermiticity_residuals(const DiscretizedPair& pair) {
  const Matrix& g = pair.G_raw.matrix();
  const Matrix& hm = pair.H.matrix();
  const Matrix r = g * hm - hm.adjoint() * g;
  const double scale = g.norm() * hm.norm();
  const Index n = hm.rows();
  const double interior = n > 4 ? r.middleRows(2, n - 4).norm() : 0.0;
  return {r.norm() / scale, interior / scale};
}

SamsonovReport samsonov_report(const HalfLineSpec& spec, const std::vector<Index>& schedule) {
  spec.validate();
  if (schedule.empty()) throw Error(ErrorKind::InvalidSpec, "empty refinement schedule");
  if (!std::is_sorted(schedule.begin(), schedule.end()) ||
      std::adjacent_find(schedule.begin(), schedule.end()) != schedule.end())
    throw Error(ErrorKind::InvalidSpec, "refinement schedule must be strictly ascending in n");

  SamsonovReport report;
  report.spec = spec;
  const double d2 = spec.d * spec.d;

  for (Index n : schedule) {
    HalfLineSpec s = spec;
    s.n = n;
    const DiscretizedPair pair = build_pair(s);
    SamsonovRow row;
    row.n = n;
    row.h = pair.spacing;

    const Eigensystem ges = eig_hermitian(pair.G_raw);
    Eigen::VectorXd lg = ges.eigenvalues.real();
    row.min_eig_G = lg.minCoeff();
    row.gap_to_d2 = row.min_eig_G - d2;

    const auto [full, interior] = quasi_hermiticity_residuals(pair);
    row.residual_full = full;
    row.residual_interior = interior;

    const double floor = report.floor_epsilon * lg.cwiseAbs().maxCoeff();
    for (Index i = 0; i < lg.size(); ++i) {
      if (lg(i) < floor) {
        lg(i) = floor;
        ++row.floored_eigenvalues;
      }
    }
    if (!(lg.minCoeff() > 0.0) || !lg.allFinite())
      throw Error(ErrorKind::SingularMetric, "floored metric spectrum is still not positive");
    const Matrix& v = ges.right_vectors;
    const Matrix g_half = v * lg.cwiseSqrt().cast<Complex>().asDiagonal() * v.adjoint();
    const Matrix g_invhalf = v * lg.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() * v.adjoint();
    row.herm_residual_h = hermiticity_residual(g_half * pair.H.matrix() * g_invhalf);

    const Eigensystem hes = eig_general(pair.H);
    row.defective_H = hes.defective;
    row.max_im_lambda_H = hes.eigenvalues.imag().cwiseAbs().maxCoeff();
    row.min_re_lambda_H = hes.eigenvalues.real().minCoeff();

    if (!report.rows.empty()) {
      const SamsonovRow& prev = report.rows.back();
      row.order_gap = observed_order(std::abs(prev.gap_to_d2), std::abs(row.gap_to_d2), prev.n, n);
      row.order_residual_full = observed_order(prev.residual_full, row.residual_full, prev.n, n);
      row.order_herm_h = observed_order(prev.herm_residual_h, row.herm_residual_h, prev.n, n);

      if (!nonincreasing(prev.residual_interior, row.residual_interior))
        report.interior_residual_nonincreasing = false;
      if (!nonincreasing(prev.max_im_lambda_H, row.max_im_lambda_H)) report.im_lambda_nonincreasing = false;
      if (std::abs(row.gap_to_d2) > std::abs(prev.gap_to_d2)) report.min_eig_monotone = false;
    }
    report.rows.push_back(row);
  }

  if (!report.interior_residual_nonincreasing)
    report.failures.push_back("interior quasi-Hermiticity residual increased under refinement");
  if (!report.im_lambda_nonincreasing) report.failures.push_back("max |Im lambda(H)| increased under refinement");
  if (!report.min_eig_monotone) report.failures.push_back("min eig(G) did not approach d^2 monotonically");
  for (const auto& row : report.rows)
    if (row.defective_H) report.notes.push_back("H is numerically defective at n = " + std::to_string(row.n));
  report.passed =
      report.interior_residual_nonincreasing && report.im_lambda_nonincreasing && report.min_eig_monotone;
  return report;
}

std::string samsonov_csv(const SamsonovReport& report) {
  std::ostringstream out;
  out << "n,h,min_eig_G,gap_to_d2,residual_full,residual_interior,herm_residual_h,max_im_lambda_H,order_estimates\n";
  for (const auto& r : report.rows) {
    std::string orders;
    auto add = [&](const char* key, const std::optional<double>& v) {
      if (!v) return;
      if (!orders.empty()) orders += ';';
      orders += key;
      orders += '=';
      orders += fmt(*v);
    };
    add("gap", r.order_gap);
    add("residual_full", r.order_residual_full);
    add("herm_h", r.order_herm_h);
    out << r.n << ',' << fmt(r.h) << ',' << fmt(r.min_eig_G) << ',' << fmt(r.gap_to_d2) << ','
        << fmt(r.residual_full) << ',' << fmt(r.residual_interior) << ',' << fmt(r.herm_residual_h) << ','
        << fmt(r.max_im_lambda_H) << ',' << orders << '\n';
  }
  return out.str();
}

}  // namespace qhm
