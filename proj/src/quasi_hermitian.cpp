#include "qhm/quasi_hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace qhm {

namespace {

void require_same_dim(const Operator& a, const Operator& b, const char* what) {
  if (a.dim() != b.dim()) {
    std::ostringstream msg;
    msg << what << ": dimensions " << a.dim() << " and " << b.dim() << " differ";
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
}

// Eigenvector columns scaled to unit max-norm, largest entry real positive.
// This is the normalization under which the canonical metric of an upper
// triangular matrix is read off its back-substituted eigenvectors.
Matrix max_normalized(Matrix v) {
  normalize_columns(v);
  for (Index j = 0; j < v.cols(); ++j) {
    const double peak = v.col(j).cwiseAbs().maxCoeff();
    if (peak > 0.0) v.col(j) /= peak;
  }
  return v;
}

std::vector<EigenCluster> contiguous_clusters(const Vector& values, double tol) {
  std::vector<EigenCluster> out;
  for (Index i = 0; i < values.size(); ++i) {
    if (!out.empty()) {
      const Complex head = out.back().value;
      if (std::abs(values(i) - head) <= tol * (1.0 + std::abs(head))) {
        ++out.back().size;
        continue;
      }
    }
    out.push_back({values(i), i, 1});
  }
  return out;
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

double quasi_hermiticity_residual(const Operator& a, const Operator& g) {
  require_same_dim(a, g, "quasi_hermiticity_residual");
  const Matrix& am = a.matrix();
  const Matrix& gm = g.matrix();
  const double num = (gm * am - am.adjoint() * gm).norm();
  return num / (gm.norm() * am.norm() + std::numeric_limits<double>::min());
}

MetricSolution solve_metric(const Operator& a, double tol) {
  const Index n = a.dim();
  std::vector<std::string> warnings;
  Matrix s;
  Vector eigenvalues;
  double vector_condition = 1.0;
  Matrix g0;

  if (hermiticity_residual(a.matrix()) <= tol) {
    // already self-adjoint: orthonormal eigenvectors and the trivial metric
    const Eigensystem es = eig_hermitian(a, tol);
    s = es.right_vectors;
    eigenvalues = es.eigenvalues;
    vector_condition = es.vector_condition;
    g0 = Matrix::Identity(n, n);
  } else {
    const Eigensystem es = eig_general(a, tol);
    if (es.defective)
      throw Error(ErrorKind::Defective, "operator is not diagonalizable at tolerance; no scalar-type metric");

    std::vector<Complex> offending;
    bool hard = false;
    for (Index i = 0; i < n; ++i) {
      const Complex z = es.eigenvalues(i);
      if (is_real_eigenvalue(z, tol)) continue;
      offending.push_back(z);
      if (!is_real_eigenvalue(z, kBorderlineRealityFactor * tol)) hard = true;
    }
    if (hard) {
      std::ostringstream msg;
      msg << offending.size() << " eigenvalue(s) off the real axis, e.g. " << offending.front();
      throw ComplexSpectrum(std::move(offending), msg.str());
    }
    if (!offending.empty()) {
      std::ostringstream msg;
      msg << "IllConditioned: " << offending.size()
          << " borderline eigenvalue(s) treated as real, e.g. " << offending.front();
      warnings.push_back(msg.str());
    }

    s = max_normalized(es.right_vectors);
    eigenvalues = es.eigenvalues;
    vector_condition = es.vector_condition;
    const Matrix w = s.fullPivLu().inverse();
    g0 = hermitian_part(w.adjoint() * w);
  }

  Eigen::SelfAdjointEigenSolver<Matrix> spectrum(g0, Eigen::EigenvaluesOnly);
  const double top = spectrum.eigenvalues().maxCoeff();
  if (!(top > 0.0) || !std::isfinite(top))
    throw Error(ErrorKind::SingularMetric, "metric candidate has no positive spectrum");
  const double scale = 1.0 / top;

  if (vector_condition > kIllConditionedThreshold) {
    std::ostringstream msg;
    msg << "IllConditioned: eigenvector matrix condition " << vector_condition;
    warnings.push_back(msg.str());
  }

  MetricSolution sol{make_metric(Operator(g0 * scale, "G"), tol), Operator(s, "S"), eigenvalues, {}, 0, 0, scale,
                     vector_condition, std::move(warnings)};
  sol.freedom = contiguous_clusters(eigenvalues, tol);
  const Matrix& gm = sol.canonical.G().matrix();
  sol.residual = (gm * a.matrix() - a.matrix().adjoint() * gm).norm();
  sol.relative_residual = quasi_hermiticity_residual(a, sol.canonical.G());
  if (sol.relative_residual > tol) {
    std::ostringstream msg;
    msg << "IllConditioned: metric residual " << sol.relative_residual << " above tolerance " << tol;
    sol.warnings.push_back(msg.str());
  }
  return sol;
}

Operator metric_from_freedom(const MetricSolution& solution, const std::vector<Matrix>& blocks) {
  if (blocks.size() != solution.freedom.size()) {
    std::ostringstream msg;
    msg << "expected " << solution.freedom.size() << " blocks, got " << blocks.size();
    throw Error(ErrorKind::DimensionMismatch, msg.str());
  }
  const Index n = solution.eigvec_matrix.dim();
  Matrix d = Matrix::Zero(n, n);
  for (size_t k = 0; k < blocks.size(); ++k) {
    const EigenCluster& c = solution.freedom[k];
    const Matrix& b = blocks[k];
    if (b.rows() != c.size || b.cols() != c.size)
      throw Error(ErrorKind::DimensionMismatch, "freedom block does not match its eigenvalue cluster");
    if (hermiticity_residual(b) > kDefaultTol) throw Error(ErrorKind::NotHermitian, "freedom block is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(b), Eigen::EigenvaluesOnly);
    if (!(es.eigenvalues().minCoeff() > 0.0))
      throw NotPositiveDefinite(es.eigenvalues().minCoeff(), "freedom block is not positive definite");
    d.block(c.begin, c.begin, c.size, c.size) = hermitian_part(b);
  }
  const Matrix w = solution.eigvec_matrix.matrix().fullPivLu().inverse();
  return Operator(hermitian_part(solution.scale * (w.adjoint() * d * w)), "G_D");
}

QuasiSelfAdjointTransform quasi_sa_transform(const Operator& a, const MetricOperator& m, double tol,
                                             bool force) {
  require_same_dim(a, m.G(), "quasi_sa_transform");
  QuasiSelfAdjointTransform out;
  out.metric_residual = quasi_hermiticity_residual(a, m.G());
  if (out.metric_residual > tol) {
    if (!force) {
      std::ostringstream msg;
      msg << "||GA - A^dagger G|| relative residual " << out.metric_residual << " exceeds " << tol;
      throw Error(ErrorKind::NotQuasiHermitian, msg.str());
    }
    out.forced = true;
  }
  out.K = Operator(m.G_half().matrix() * a.matrix() * m.G_invhalf().matrix(), "K");
  out.hermiticity_residual = hermiticity_residual(out.K.matrix());
  return out;
}

Operator sharp_adjoint(const Operator& s, const MetricOperator& m) {
  require_same_dim(s, m.G(), "sharp_adjoint");
  const Matrix& g = m.G().matrix();
  Matrix out = g.llt().solve(s.matrix().adjoint() * g);
  return Operator(std::move(out), s.label().empty() ? std::string{} : s.label() + "^#");
}

Operator minimal_b0(const Operator& a, const MetricOperator& m) {
  require_same_dim(a, m.G(), "minimal_b0");
  const Matrix& g = m.G().matrix();
  // X = G A G^-1  <=>  X^dagger = G^-1 (G A)^dagger
  const Matrix ga = g * a.matrix();
  const Matrix x_adj = g.llt().solve(ga.adjoint());
  return Operator(x_adj.adjoint(), "B0");
}

Signature inertia(const Operator& h, double tol) {
  const Eigensystem es = eig_hermitian(h, tol);
  const Eigen::VectorXd l = es.eigenvalues.real();
  const double cut = tol * l.cwiseAbs().maxCoeff();
  Signature sig;
  for (Index i = 0; i < l.size(); ++i) {
    if (l(i) > cut) ++sig.positive;
    else if (l(i) < -cut) ++sig.negative;
    else ++sig.zero;
  }
  return sig;
}

std::pair<bool, KreinStructure> krein_check(const Operator& a, const Operator& j, double tol) {
  require_same_dim(a, j, "krein_check");
  const Index n = j.dim();
  const Matrix& jm = j.matrix();
  const Matrix id = Matrix::Identity(n, n);
  const double involution = (jm * jm - id).norm();
  if (involution > tol * std::sqrt(static_cast<double>(n))) {
    std::ostringstream msg;
    msg << "||J^2 - I||_F = " << involution;
    throw Error(ErrorKind::NotInvolution, msg.str());
  }
  if (hermiticity_residual(jm) > tol) throw Error(ErrorKind::NotHermitian, "J is not Hermitian");

  KreinStructure k;
  k.J = Operator(hermitian_part(jm), j.label());
  const Signature sig = inertia(k.J, tol);
  k.n_plus = sig.positive;
  k.n_minus = sig.negative;
  k.P_plus = Operator(0.5 * (id + k.J.matrix()), "P+");
  k.P_minus = Operator(0.5 * (id - k.J.matrix()), "P-");

  const Matrix& am = a.matrix();
  const double defect = (jm * am - am.adjoint() * jm).norm();
  const bool ok = defect <= tol * am.norm() * jm.norm();
  return {ok, std::move(k)};
}

PseudoMetric solve_pseudo_metric(const Operator& a, double tol) {
  const Index n = a.dim();
  if (hermiticity_residual(a.matrix()) <= tol) {
    MetricSolution sol = solve_metric(a, tol);
    return {sol.canonical.G().with_label("T"), Signature{n, 0, 0}, sol.relative_residual};
  }

  const Eigensystem es = eig_general(a, tol);
  if (es.defective) throw Error(ErrorKind::Defective, "operator is not diagonalizable at tolerance");
  if (es.all_real(tol)) {
    MetricSolution sol = solve_metric(a, tol);
    return {sol.canonical.G().with_label("T"), Signature{n, 0, 0}, sol.relative_residual};
  }

  // M Lambda = conj(Lambda) M: unit diagonal on real eigenvalues, symmetric
  // swap entries linking each non-real eigenvalue to its conjugate partner.
  const double pair_radius = std::sqrt(tol);
  Matrix pairing = Matrix::Zero(n, n);
  std::vector<bool> used(static_cast<size_t>(n), false);
  for (Index i = 0; i < n; ++i) {
    if (used[static_cast<size_t>(i)]) continue;
    const Complex z = es.eigenvalues(i);
    if (is_real_eigenvalue(z, tol)) {
      pairing(i, i) = 1.0;
      used[static_cast<size_t>(i)] = true;
      continue;
    }
    Index best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      if (used[static_cast<size_t>(j)]) continue;
      const double dist = std::abs(es.eigenvalues(j) - std::conj(z));
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (best < 0 || best_dist > pair_radius * (1.0 + std::abs(z))) {
      std::ostringstream msg;
      msg << "eigenvalue " << z << " has no conjugate partner within " << pair_radius << " (nearest at "
          << best_dist << ")";
      throw Error(ErrorKind::SpectrumNotConjugateClosed, msg.str());
    }
    if (best == i) {
      // conjugate of itself: numerically real
      pairing(i, i) = 1.0;
    } else {
      pairing(i, best) = 1.0;
      pairing(best, i) = 1.0;
      used[static_cast<size_t>(best)] = true;
    }
    used[static_cast<size_t>(i)] = true;
  }

  const Matrix s = max_normalized(es.right_vectors);
  const Matrix w = s.fullPivLu().inverse();
  Matrix t = hermitian_part(w.adjoint() * pairing * w);
  const double top = spectral_norm(t);
  if (!(top > 0.0) || !std::isfinite(top)) throw Error(ErrorKind::SingularMetric, "pseudo-metric vanished");
  t /= top;

  PseudoMetric out{Operator(std::move(t), "T"), {}, 0};
  out.signature = inertia(out.T, tol);
  out.residual = quasi_hermiticity_residual(a, out.T);
  return out;
}

}  // namespace qhm
