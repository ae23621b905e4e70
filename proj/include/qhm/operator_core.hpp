#pragma once

// Dense complex matrix kernels shared by every other module: the Operator
// value type, adjoints, Hermitian and general eigendecompositions, positive
// definite square roots and a few norm helpers.

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

#include "qhm/errors.hpp"

namespace qhm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr double kDefaultTol = 1e-10;

/// Square complex matrix with a free-text label. Entries are always finite.
class Operator {
 public:
  Operator() = default;
  explicit Operator(Matrix entries, std::string label = {});

  static Operator identity(Index dim, std::string label = "I");
  static Operator zero(Index dim, std::string label = "0");

  Index dim() const noexcept { return entries_.rows(); }
  const Matrix& matrix() const noexcept { return entries_; }
  const std::string& label() const noexcept { return label_; }

  Operator with_label(std::string label) const { return Operator(entries_, std::move(label)); }

  friend bool operator==(const Operator& a, const Operator& b) {
    return a.entries_.rows() == b.entries_.rows() && a.entries_ == b.entries_;
  }

 private:
  Matrix entries_;
  std::string label_;
};

struct Eigensystem {
  Vector eigenvalues;
  Matrix right_vectors;  // unit Euclidean norm columns
  double vector_condition = 1.0;
  bool defective = false;

  Index dim() const noexcept { return eigenvalues.size(); }
  bool all_real(double tol) const;
};

/// Relative reality test |Im z| <= tol (1 + |z|).
bool is_real_eigenvalue(Complex z, double tol);

/// Groups eigenvalues that are within radius (1 + |z|) of a group's first
/// member. Input is scanned in order; each group lists original indices.
std::vector<std::vector<Index>> cluster_eigenvalues(const Vector& values, double radius);

Operator adjoint(const Operator& a);

/// ||A - A^dagger||_F / ||A||_F, zero for the zero matrix.
double hermiticity_residual(const Matrix& a);

double spectral_norm(const Matrix& a);
Eigen::VectorXd singular_values(const Matrix& a);

/// Symmetric Hausdorff distance between two finite point sets in C.
double hausdorff_distance(const Vector& a, const Vector& b);

Eigensystem eig_hermitian(const Operator& h, double tol = kDefaultTol);
Eigensystem eig_general(const Operator& a, double tol = kDefaultTol);

/// Eigenvalues only, sorted like eig_general. Cheaper for large matrices.
Vector eigenvalues_general(const Operator& a, double tol = kDefaultTol);

struct SquareRoots {
  Operator half;
  Operator inv_half;
};

SquareRoots sqrt_pd(const Operator& g, double tol = kDefaultTol);

/// Same, reusing an eigen-decomposition of g obtained from eig_hermitian.
SquareRoots sqrt_pd(const Operator& g, const Eigensystem& es, double tol);

/// Rescales every column to unit Euclidean norm and rotates its phase so the
/// largest-modulus entry is real and positive.
void normalize_columns(Matrix& v);

}  // namespace qhm
