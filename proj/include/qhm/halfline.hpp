#pragma once

// Finite-difference model of H = -d^2/dx^2 on the half-line with the complex
// Robin condition xi'(0) + (d + i b) xi(0) = 0, and of the metric
// G = -d^2/dx^2 - 2 i b d/dx + d^2 + b^2 = (-d/dx + d - i b)(d/dx + d + i b).
//
// Grid: x_j = j h, j = 0..n-1, h = box_length / n, Dirichlet at x_n = box_length.
// H uses the 3-point Laplacian with the Robin row from ghost-point
// elimination, expressed in the half-weight coordinates W^{1/2} (W =
// diag(1/2, 1, ..., 1)) so that H is complex symmetric. G is assembled as
// L^dagger L from the forward-difference factor L = d/dx + (d + i b) in the
// same coordinates, hence exactly Hermitian positive semidefinite.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qhm/operator_core.hpp"

namespace qhm {

enum class FarBoundary { Dirichlet };

struct HalfLineSpec {
  double d = -1.0;
  double b = 1.0;
  double box_length = 40.0;
  Index n = 200;
  FarBoundary far_bc = FarBoundary::Dirichlet;
  int scheme_order = 2;

  double spacing() const { return box_length / static_cast<double>(n); }
  /// 40 / |d|, or 40 when d = 0.
  static double default_box_length(double d);
  /// Throws InvalidSpec.
  void validate() const;
};

struct DiscretizedPair {
  Operator H;
  Operator G_raw;
  Operator L_factor;
  double spacing = 0;
};

DiscretizedPair build_pair(const HalfLineSpec& spec);

/// (H, G_raw) as plain operators for the other modules.
std::pair<Operator, Operator> export_operators(const DiscretizedPair& pair);

/// ||G H - H^dagger G||_F / (||G||_F ||H||_F) over all rows, and over rows
/// [2, n-3] which do not touch either boundary.
std::pair<double, double> quasi_hermiticity_residuals(const DiscretizedPair& pair);

inline constexpr double kSpectrumFloor = 1e-12;

/// Values at or below this are treated as rounding noise by the trend checks.
inline constexpr double kTrendNoiseFloor = 1e-13;

struct SamsonovRow {
  Index n = 0;
  double h = 0;
  double min_eig_G = 0;
  double gap_to_d2 = 0;
  double residual_full = 0;
  double residual_interior = 0;
  double herm_residual_h = 0;
  double max_im_lambda_H = 0;
  double min_re_lambda_H = 0;
  bool defective_H = false;
  Index floored_eigenvalues = 0;
  // observed orders from the previous row: log(e_prev / e) / log(n / n_prev)
  std::optional<double> order_gap;
  std::optional<double> order_residual_full;
  std::optional<double> order_herm_h;
};

struct SamsonovReport {
  HalfLineSpec spec;
  double floor_epsilon = kSpectrumFloor;
  std::vector<SamsonovRow> rows;
  bool interior_residual_nonincreasing = true;
  bool im_lambda_nonincreasing = true;
  bool min_eig_monotone = true;
  bool passed = true;
  std::vector<std::string> failures;
  std::vector<std::string> notes;  // e.g. numerically defective H, reported but not failing
};

/// Runs the refinement schedule (ascending n) for fixed d, b, box_length.
SamsonovReport samsonov_report(const HalfLineSpec& spec, const std::vector<Index>& schedule);

std::string samsonov_csv(const SamsonovReport& report);

}  // namespace qhm
