#include "qhm/quasi_similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

namespace qhm {

namespace {

struct Cluster {
  Complex value;
  Index multiplicity;
};

std::vector<Cluster> clusters_of(const Vector& values, double tol) {
  std::vector<Cluster> out;
  for (const auto& group : cluster_eigenvalues(values, tol)) {
    Complex mean = 0;
    for (Index i : group) mean += values(i);
    mean /= static_cast<double>(group.size());
    out.push_back({mean, static_cast<Index>(group.size())});
  }
  return out;
}

// Greedy global matching: repeatedly take the closest admissible pair.
// Returns (index_a, index_b, distance) triples; unmatched entries are marked
// in the returned flags.
template <typename PointA, typename PointB>
std::vector<std::tuple<size_t, size_t, double>> greedy_match(const std::vector<PointA>& a, const std::vector<PointB>& b,
                                                            double tol, std::vector<bool>& used_a,
                                                            std::vector<bool>& used_b) {
  std::vector<std::tuple<double, size_t, size_t>> candidates;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) {
      const double dist = std::abs(a[i] - b[j]);
      if (dist <= tol * (1.0 + std::abs(a[i]))) candidates.emplace_back(dist, i, j);
    }
  std::sort(candidates.begin(), candidates.end());
  used_a.assign(a.size(), false);
  used_b.assign(b.size(), false);
  std::vector<std::tuple<size_t, size_t, double>> out;
  for (const auto& [dist, i, j] : candidates) {
    if (used_a[i] || used_b[j]) continue;
    used_a[i] = used_b[j] = true;
    out.emplace_back(i, j, dist);
  }
  return out;
}

std::vector<Complex> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

// Every eigenvalue of A paired one-to-one with an eigenvalue of B.
bool multisets_coincide(const Vector& a, const Vector& b, double tol) {
  if (a.size() != b.size()) return false;
  std::vector<bool> ua, ub;
  const auto va = to_std(a), vb = to_std(b);
  return greedy_match(va, vb, tol, ua, ub).size() == va.size();
}

}  // namespace

bool SpectralMatch::inclusion() const {
  if (!unmatched_a.empty()) return false;
  return std::all_of(pairs.begin(), pairs.end(), [](const SpectralPair& p) { return p.m_a <= p.m_b; });
}

bool SpectralMatch::equality() const {
  if (!unmatched_a.empty() || !unmatched_b.empty()) return false;
  return std::all_of(pairs.begin(), pairs.end(), [](const SpectralPair& p) { return p.m_a == p.m_b; });
}

bool is_normal(const Operator& a, double tol) {
  const Matrix& m = a.matrix();
  const double scale = m.squaredNorm();
  if (scale == 0.0) return true;
  return (m * m.adjoint() - m.adjoint() * m).norm() <= tol * scale;
}

IntertwinerReport verify_intertwining(const Operator& a, const Operator& b, const Operator& t, double tol) {
  if (a.dim() != b.dim() || t.dim() != a.dim()) {
    std::ostringstream msg;
    msg << "verify_intertwining: A is " << a.dim() << ", B is " << b.dim() << ", T is " << t.dim();
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
  const Matrix& tm = t.matrix();
  IntertwinerReport r;
  const double scale = tm.norm() * (a.matrix().norm() + b.matrix().norm());
  r.residual = (tm * a.matrix() - b.matrix() * tm).norm() / (scale + std::numeric_limits<double>::min());

  const Eigen::VectorXd s = singular_values(tm);
  r.singular_values.assign(s.data(), s.data() + s.size());
  r.min_sv = s(s.size() - 1);
  const double cut = tol * s(0);
  r.numerical_rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cut && s(i) > 0.0) ++r.numerical_rank;
  r.quasi_affinity = r.numerical_rank == t.dim();
  r.bounded_inverse_proxy = r.min_sv;
  r.condition = r.min_sv > 0.0 ? s(0) / r.min_sv : std::numeric_limits<double>::infinity();
  return r;
}

SpectralMatch spectral_comparison(const Operator& a, const Operator& b, double tol) {
  const auto ca = clusters_of(eigenvalues_general(a), tol);
  const auto cb = clusters_of(eigenvalues_general(b), tol);
  std::vector<Complex> va, vb;
  for (const auto& c : ca) va.push_back(c.value);
  for (const auto& c : cb) vb.push_back(c.value);

  SpectralMatch out;
  out.match_tol = tol;
  std::vector<bool> used_a, used_b;
  auto matches = greedy_match(va, vb, tol, used_a, used_b);
  std::sort(matches.begin(), matches.end());
  for (const auto& [i, j, dist] : matches)
    out.pairs.push_back({ca[i].value, cb[j].value, dist, ca[i].multiplicity, cb[j].multiplicity});
  for (size_t i = 0; i < ca.size(); ++i)
    if (!used_a[i])
      for (Index k = 0; k < ca[i].multiplicity; ++k) out.unmatched_a.push_back(ca[i].value);
  for (size_t j = 0; j < cb.size(); ++j)
    if (!used_b[j])
      for (Index k = 0; k < cb[j].multiplicity; ++k) out.unmatched_b.push_back(cb[j].value);
  return out;
}

PushReport push_eigenvectors(const Operator& a, const Operator& b, const Operator& t, double tol) {
  const IntertwinerReport ir = verify_intertwining(a, b, t, tol);
  if (ir.residual > tol) {
    std::ostringstream msg;
    msg << "T A - B T relative residual " << ir.residual << " exceeds " << tol;
    throw Error(ErrorKind::IntertwiningViolated, msg.str());
  }
  PushReport report;
  report.intertwining_residual = ir.residual;
  const Eigensystem es = eig_general(a);
  const double t_norm = ir.singular_values.front();
  for (Index k = 0; k < es.dim(); ++k) {
    const Complex lambda = es.eigenvalues(k);
    const Vector y = t.matrix() * es.right_vectors.col(k);
    const double y_norm = y.norm();
    if (y_norm <= tol * t_norm) {
      report.annihilated.push_back(lambda);
      continue;
    }
    PushedEigenvector p;
    p.lambda = lambda;
    p.image_norm = y_norm;
    p.residual = (b.matrix() * y - lambda * y).norm() / y_norm;
    p.ok = p.residual <= tol;
    report.max_residual = std::max(report.max_residual, p.residual);
    if (!p.ok) report.passed = false;
    report.pushed.push_back(p);
  }
  return report;
}

MutualQsReport mutual_qs_check(const Operator& a, const Operator& b, const Operator& t_ab, const Operator& t_ba,
                               double tol, double match_tol) {
  MutualQsReport r;
  r.ab = verify_intertwining(a, b, t_ab, tol);
  r.ba = verify_intertwining(b, a, t_ba, tol);
  r.intertwinings_hold = r.ab.residual <= tol && r.ba.residual <= tol;
  r.quasi_affinities = r.ab.quasi_affinity && r.ba.quasi_affinity;
  r.spectra = spectral_comparison(a, b, match_tol);
  r.point_spectra_equal = r.spectra.equality();

  r.both_normal = is_normal(a, tol) && is_normal(b, tol);
  if (r.both_normal)
    r.unitary_equivalence = multisets_coincide(eigenvalues_general(a), eigenvalues_general(b), match_tol);
  r.bounded_inverses = r.ab.min_sv > tol && r.ba.min_sv > tol;
  // sigma = sigma_p at finite dimension
  if (r.bounded_inverses) r.full_spectra_equal = r.point_spectra_equal;

  if (!r.intertwinings_hold) {
    std::ostringstream msg;
    msg << "intertwining residuals " << r.ab.residual << " (A->B), " << r.ba.residual << " (B->A)";
    r.failures.push_back(msg.str());
  }
  if (!r.quasi_affinities) r.failures.push_back("an intertwiner is not a quasi-affinity (rank deficient)");
  if (!r.point_spectra_equal) r.failures.push_back("point spectra or multiplicities differ");
  if (r.both_normal && !r.unitary_equivalence) r.failures.push_back("normal pair with different eigenvalue multisets");
  if (r.bounded_inverses && !r.full_spectra_equal) r.failures.push_back("spectra differ despite bounded inverses");
  r.passed = r.failures.empty();
  return r;
}

std::vector<double> resolvent_norms(const Operator& a, const std::vector<Complex>& grid) {
  const Index n = a.dim();
  std::vector<double> out(grid.size());
  for (size_t k = 0; k < grid.size(); ++k) {
    const Matrix shifted = a.matrix() - grid[k] * Matrix::Identity(n, n);
    const Eigen::VectorXd s = singular_values(shifted);
    const double smin = s(s.size() - 1);
    const bool on_spectrum = smin <= std::numeric_limits<double>::epsilon() * s(0);
    out[k] = on_spectrum ? std::numeric_limits<double>::infinity() : 1.0 / smin;
  }
  return out;
}

}  // namespace qhm
