#include "qhm/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace qhm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidOperator: return "InvalidOperator";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::ComplexSpectrum: return "ComplexSpectrum";
    case ErrorKind::Defective: return "Defective";
    case ErrorKind::NotQuasiHermitian: return "NotQuasiHermitian";
    case ErrorKind::NotQuasiSelfAdjoint: return "NotQuasiSelfAdjoint";
    case ErrorKind::NotInvolution: return "NotInvolution";
    case ErrorKind::SpectrumNotConjugateClosed: return "SpectrumNotConjugateClosed";
    case ErrorKind::IntertwiningViolated: return "IntertwiningViolated";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::SingularMetric: return "SingularMetric";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

Operator::Operator(Matrix entries, std::string label)
    : entries_(std::move(entries)), label_(std::move(label)) {
  if (entries_.rows() != entries_.cols()) {
    std::ostringstream msg;
    msg << "operator must be square, got " << entries_.rows() << "x" << entries_.cols();
    throw Error(ErrorKind::InvalidOperator, msg.str());
  }
  if (entries_.rows() == 0) throw Error(ErrorKind::InvalidOperator, "operator dimension must be positive");
  if (!entries_.allFinite()) throw Error(ErrorKind::InvalidOperator, "operator has non-finite entries");
}

Operator Operator::identity(Index dim, std::string label) {
  return Operator(Matrix::Identity(dim, dim), std::move(label));
}

Operator Operator::zero(Index dim, std::string label) {
  return Operator(Matrix::Zero(dim, dim), std::move(label));
}

bool is_real_eigenvalue(Complex z, double tol) {
  return std::abs(z.imag()) <= tol * (1.0 + std::abs(z));
}

bool Eigensystem::all_real(double tol) const {
  for (Index i = 0; i < eigenvalues.size(); ++i)
    if (!is_real_eigenvalue(eigenvalues(i), tol)) return false;
  return true;
}

std::vector<std::vector<Index>> cluster_eigenvalues(const Vector& values, double radius) {
  std::vector<std::vector<Index>> groups;
  for (Index i = 0; i < values.size(); ++i) {
    const Complex z = values(i);
    bool placed = false;
    for (auto& g : groups) {
      const Complex head = values(g.front());
      if (std::abs(z - head) <= radius * (1.0 + std::abs(head))) {
        g.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({i});
  }
  return groups;
}

Operator adjoint(const Operator& a) {
  return Operator(a.matrix().adjoint(), a.label().empty() ? std::string{} : a.label() + "^dagger");
}

double hermiticity_residual(const Matrix& a) {
  const double scale = a.norm();
  if (scale == 0.0) return 0.0;
  return (a - a.adjoint()).norm() / scale;
}

Eigen::VectorXd singular_values(const Matrix& a) {
  if (a.rows() <= 16) return Eigen::JacobiSVD<Matrix>(a).singularValues();
  return Eigen::BDCSVD<Matrix>(a).singularValues();
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a)(0);
}

double hausdorff_distance(const Vector& a, const Vector& b) {
  auto directed = [](const Vector& from, const Vector& to) {
    double worst = 0.0;
    for (Index i = 0; i < from.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (Index j = 0; j < to.size(); ++j) best = std::min(best, std::abs(from(i) - to(j)));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

void normalize_columns(Matrix& v) {
  for (Index j = 0; j < v.cols(); ++j) {
    auto col = v.col(j);
    const double n = col.norm();
    if (n == 0.0) continue;
    col /= n;
    Index arg = 0;
    double peak = 0.0;
    for (Index i = 0; i < col.size(); ++i) peak = std::max(peak, std::abs(col(i)));
    // first entry within rounding of the peak, so ties resolve by index
    for (Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) >= peak * (1.0 - 1e-12)) {
        arg = i;
        break;
      }
    }
    const Complex phase = col(arg) / std::abs(col(arg));
    col *= std::conj(phase);
    col(arg) = std::abs(col(arg));
  }
}

namespace {

// Ascending by real part; runs of real parts equal within tol are ordered by
// imaginary part.
std::vector<Index> spectral_order(const Vector& values, double tol) {
  std::vector<Index> order(static_cast<size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values(a).real() < values(b).real(); });
  size_t start = 0;
  while (start < order.size()) {
    const Complex head = values(order[start]);
    size_t end = start + 1;
    while (end < order.size() &&
           values(order[end]).real() - head.real() <= tol * (1.0 + std::abs(head)))
      ++end;
    std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](Index a, Index b) { return values(a).imag() < values(b).imag(); });
    start = end;
  }
  return order;
}

double condition_of(const Matrix& v) {
  const Eigen::VectorXd s = singular_values(v);
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

}  // namespace

Eigensystem eig_hermitian(const Operator& h, double tol) {
  const Matrix& m = h.matrix();
  const double scale = m.norm();
  const double skew = (m - m.adjoint()).norm();
  if (skew > tol * scale) {
    std::ostringstream msg;
    msg << "||H - H^dagger||_F = " << skew << " exceeds " << tol << " * ||H||_F";
    throw Error(ErrorKind::NotHermitian, msg.str());
  }
  const Matrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::ConvergenceFailure, "Hermitian eigensolver did not converge");

  Eigensystem out;
  out.eigenvalues = solver.eigenvalues().cast<Complex>();
  out.right_vectors = solver.eigenvectors();
  normalize_columns(out.right_vectors);
  const Index n = m.rows();
  // V is unitary up to rounding; bound its condition number from the Gram defect
  const double defect = (out.right_vectors.adjoint() * out.right_vectors - Matrix::Identity(n, n)).norm();
  out.vector_condition = defect < 1.0 ? std::sqrt((1.0 + defect) / (1.0 - defect))
                                      : condition_of(out.right_vectors);
  out.defective = false;
  return out;
}

Vector eigenvalues_general(const Operator& a, double tol) {
  Eigen::ComplexEigenSolver<Matrix> solver(a.matrix(), /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::ConvergenceFailure, "complex Schur iteration did not converge");
  const Vector raw = solver.eigenvalues();
  const auto order = spectral_order(raw, tol);
  Vector sorted(raw.size());
  for (size_t k = 0; k < order.size(); ++k) sorted(static_cast<Index>(k)) = raw(order[k]);
  return sorted;
}

Eigensystem eig_general(const Operator& a, double tol) {
  Eigen::ComplexEigenSolver<Matrix> solver(a.matrix(), /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::ConvergenceFailure, "complex Schur iteration did not converge");

  const Vector raw = solver.eigenvalues();
  const Matrix raw_vectors = solver.eigenvectors();
  const auto order = spectral_order(raw, tol);
  const Index n = raw.size();

  Eigensystem out;
  out.eigenvalues.resize(n);
  out.right_vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = raw(order[static_cast<size_t>(k)]);
    out.right_vectors.col(k) = raw_vectors.col(order[static_cast<size_t>(k)]);
  }
  normalize_columns(out.right_vectors);
  out.vector_condition = condition_of(out.right_vectors);

  // A perturbed Jordan block of size k splits its eigenvalue by ~eps^(1/k), so
  // candidate multiple eigenvalues are grouped at sqrt(tol). Within a group the
  // geometric multiplicity is the numerical rank of the computed eigenvectors.
  const double threshold = std::sqrt(tol);
  out.defective = false;
  for (const auto& group : cluster_eigenvalues(out.eigenvalues, threshold)) {
    if (group.size() < 2) continue;
    Matrix block(n, static_cast<Index>(group.size()));
    for (size_t j = 0; j < group.size(); ++j) block.col(static_cast<Index>(j)) = out.right_vectors.col(group[j]);
    const Eigen::VectorXd s = singular_values(block);
    Index rank = 0;
    for (Index i = 0; i < s.size(); ++i)
      if (s(i) > threshold * s(0)) ++rank;
    if (rank < static_cast<Index>(group.size())) {
      out.defective = true;
      break;
    }
  }
  return out;
}

SquareRoots sqrt_pd(const Operator& g, double tol) { return sqrt_pd(g, eig_hermitian(g, tol), tol); }

SquareRoots sqrt_pd(const Operator& g, const Eigensystem& es, double tol) {
  const Eigen::VectorXd lambda = es.eigenvalues.real();
  const double lmin = lambda.minCoeff();
  const double lmax = lambda.cwiseAbs().maxCoeff();
  if (!(lmin > tol * lmax)) {
    std::ostringstream msg;
    msg << "minimum eigenvalue " << lmin << " is not above " << tol << " * ||G||_2 = " << tol * lmax;
    throw NotPositiveDefinite(lmin, msg.str());
  }
  const Matrix& v = es.right_vectors;
  Matrix half = v * lambda.cwiseSqrt().cast<Complex>().asDiagonal() * v.adjoint();
  Matrix inv_half = v * lambda.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal() * v.adjoint();
  half = 0.5 * (half + half.adjoint()).eval();
  inv_half = 0.5 * (inv_half + inv_half.adjoint()).eval();
  return {Operator(std::move(half), g.label() + "^(1/2)"), Operator(std::move(inv_half), g.label() + "^(-1/2)")};
}

}  // namespace qhm
