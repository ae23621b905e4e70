#include <doctest.h>

#include <cmath>

#include "qhm/halfline.hpp"
#include "qhm/quasi_hermitian.hpp"

using namespace qhm;

namespace {

HalfLineSpec spec_with(double d, double b, double box, Index n) {
  HalfLineSpec s;
  s.d = d;
  s.b = b;
  s.box_length = box;
  s.n = n;
  return s;
}

// Unweighted ghost-point matrix, built independently of build_pair: the
// Robin row reads (2 - 2 h c) xi_0 - 2 xi_1 over h^2.
Matrix raw_laplacian(double d, double b, double box, Index n) {
  const double h = box / static_cast<double>(n);
  const Complex c(d, b);
  Matrix m = Matrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    m(j, j) = 2.0;
    if (j > 0) m(j, j - 1) = -1.0;
    if (j + 1 < n) m(j, j + 1) = -1.0;
  }
  m(0, 0) = 2.0 - 2.0 * h * c;
  m(0, 1) = -2.0;
  return m / (h * h);
}

}  // namespace

TEST_CASE("HalfLineSpec validation") {
  CHECK_NOTHROW(spec_with(-1, 1, 40, 16).validate());
  for (const HalfLineSpec& bad : {spec_with(-1, 1, 40, 15), spec_with(-1, 1, 0, 100), spec_with(-1, 1, -3, 100),
                                  spec_with(NAN, 1, 40, 100), spec_with(-1, INFINITY, 40, 100)}) {
    try {
      bad.validate();
      FAIL("expected InvalidSpec");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidSpec);
    }
  }
  HalfLineSpec order = spec_with(-1, 1, 40, 64);
  order.scheme_order = 4;
  CHECK_THROWS_AS(order.validate(), Error);
  CHECK(HalfLineSpec::default_box_length(-2.0) == doctest::Approx(20.0));
  CHECK(HalfLineSpec::default_box_length(0.0) == doctest::Approx(40.0));
}

TEST_CASE("build_pair structure") {
  const HalfLineSpec s = spec_with(-1, 1, 40, 16);
  const DiscretizedPair p = build_pair(s);
  const double h = s.spacing();
  const Matrix& hm = p.H.matrix();
  REQUIRE(hm.rows() == 16);
  CHECK(p.spacing == doctest::Approx(2.5));

  // interior three-point stencil, zero outside the band
  for (Index j = 1; j < 16; ++j)
    for (Index k = 0; k < 16; ++k) {
      Complex expect = 0;
      if (k == j) expect = 2 / (h * h);
      if (std::abs(k - j) == 1 && !(j == 1 && k == 0)) expect = -1 / (h * h);
      if (j == 1 && k == 0) continue;  // weighted boundary coupling
      CHECK(std::abs(hm(j, k) - expect) <= 1e-15);
    }
  // same operator as the unweighted ghost-point scheme, up to the diagonal weight
  Eigen::VectorXd w = Eigen::VectorXd::Ones(16);
  w(0) = 0.5;
  const Matrix raw = raw_laplacian(-1, 1, 40, 16);
  const Matrix weighted = w.cwiseSqrt().cast<Complex>().asDiagonal() * raw *
                          w.cwiseSqrt().cwiseInverse().cast<Complex>().asDiagonal();
  CHECK((weighted - hm).norm() <= 1e-14 * hm.norm());

  // the factorization identity holds exactly
  const Matrix& l = p.L_factor.matrix();
  CHECK((l.adjoint() * l - p.G_raw.matrix()).norm() == 0);

  const auto [hh, gg] = export_operators(p);
  CHECK(hh == p.H);
  CHECK(gg == p.G_raw);
}

TEST_CASE("d = b = 0 is the Neumann Laplacian") {
  const DiscretizedPair p = build_pair(spec_with(0, 0, 40, 32));
  const double h = 40.0 / 32;
  CHECK(hermiticity_residual(p.H.matrix()) <= 1e-12);
  // unweighted boundary row (2 xi_0 - 2 xi_1) / h^2
  const Matrix raw = raw_laplacian(0, 0, 40, 32);
  CHECK(std::abs(raw(0, 0) - 2 / (h * h)) <= 1e-15);
  CHECK(std::abs(raw(0, 1) + 2 / (h * h)) <= 1e-15);
  const auto [full, interior] = quasi_hermiticity_residuals(p);
  CHECK(full <= 1e-12);
  CHECK(interior <= 1e-12);
}

TEST_CASE("metric acts as d^2 + b^2 on constants away from the boundaries") {
  for (const auto& [d, b] : {std::pair{-1.0, 1.0}, std::pair{-0.5, 2.0}, std::pair{0.3, -0.7}}) {
    const DiscretizedPair p = build_pair(spec_with(d, b, 40, 100));
    const Vector g1 = p.G_raw.matrix() * Vector::Ones(100);
    for (Index j = 3; j <= 100 - 3; ++j) CHECK(std::abs(g1(j) - Complex(d * d + b * b)) <= 1e-10);
  }
}

TEST_CASE("metric is positive semidefinite for every spec") {
  for (const auto& [d, b] : {std::pair{-1.0, 1.0}, std::pair{0.0, 0.0}, std::pair{2.0, -3.0}, std::pair{-0.1, 0.0}}) {
    const DiscretizedPair p = build_pair(spec_with(d, b, 20, 48));
    const Eigensystem es = eig_hermitian(p.G_raw);
    CHECK(es.eigenvalues.real().minCoeff() >= -1e-12 * es.eigenvalues.real().cwiseAbs().maxCoeff());
  }
}

TEST_CASE("b -> -b gives the adjoint of H") {
  for (Index n : {16, 50}) {
    const Matrix hp = build_pair(spec_with(-1, 1, 40, n)).H.matrix();
    const Matrix hmi = build_pair(spec_with(-1, -1, 40, n)).H.matrix();
    CHECK((hmi - hp.adjoint()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("exported pair reproduces the report residual") {
  const HalfLineSpec s = spec_with(-1, 1, 40, 32);
  const auto [h, g] = export_operators(build_pair(s));
  const SamsonovReport r = samsonov_report(s, {32});
  CHECK(quasi_hermiticity_residual(h, g) == r.rows[0].residual_full);
}

TEST_CASE("samsonov_report against the independent discretization oracle") {
  // numpy build of the same grid operators, n = 64, d = -1, b = 1, L = 40
  const SamsonovReport r = samsonov_report(spec_with(-1, 1, 40, 64), {64});
  REQUIRE(r.rows.size() == 1);
  const SamsonovRow& row = r.rows[0];
  CHECK(row.min_eig_G == doctest::Approx(1.4160175966684183).epsilon(1e-12));
  CHECK(row.gap_to_d2 == doctest::Approx(0.4160175966684183).epsilon(1e-11));
  CHECK(row.residual_full == doctest::Approx(0.01864140809435052).epsilon(1e-10));
  CHECK(row.residual_interior <= 1e-17);
  CHECK(row.herm_residual_h == doctest::Approx(0.10989547014540688).epsilon(1e-8));
  CHECK(row.max_im_lambda_H == doctest::Approx(1.877708193804093).epsilon(1e-10));
  CHECK(row.min_re_lambda_H == doctest::Approx(0.006013129557177443).epsilon(1e-8));
  CHECK(row.floored_eigenvalues == 0);
  CHECK_FALSE(row.order_gap.has_value());
}

TEST_CASE("samsonov_report trends and orders on a short schedule") {
  const SamsonovReport r = samsonov_report(spec_with(-1, 1, 40, 50), {50, 100});
  REQUIRE(r.rows.size() == 2);
  CHECK(r.rows[1].min_eig_G < r.rows[0].min_eig_G);
  CHECK(r.min_eig_monotone);
  CHECK(r.interior_residual_nonincreasing);
  REQUIRE(r.rows[1].order_gap.has_value());
  const double expect = std::log(r.rows[0].gap_to_d2 / r.rows[1].gap_to_d2) / std::log(2.0);
  CHECK(*r.rows[1].order_gap == doctest::Approx(expect));
  CHECK(r.passed == (r.interior_residual_nonincreasing && r.im_lambda_nonincreasing && r.min_eig_monotone));
}

TEST_CASE("samsonov_report control case d = b = 0") {
  const SamsonovReport r = samsonov_report(spec_with(0, 0, 40, 64), {64, 128});
  for (const auto& row : r.rows) {
    CHECK(row.residual_full <= 1e-12);
    CHECK(row.residual_interior <= 1e-12);
    CHECK(row.herm_residual_h <= 1e-12);
    CHECK(row.max_im_lambda_H <= 1e-12);
  }
  CHECK(r.interior_residual_nonincreasing);
  CHECK(r.im_lambda_nonincreasing);
  // the box ground state (pi / 2L)^2 is approached from below, away from d^2 = 0
  CHECK(r.rows[0].min_eig_G == doctest::Approx(std::pow(M_PI / 80.0, 2)).epsilon(1e-3));
  CHECK_FALSE(r.min_eig_monotone);
}

TEST_CASE("samsonov_report rejects bad schedules") {
  const HalfLineSpec s = spec_with(-1, 1, 40, 64);
  for (const std::vector<Index>& bad : {std::vector<Index>{}, std::vector<Index>{64, 32}, std::vector<Index>{64, 64},
                                        std::vector<Index>{8}}) {
    try {
      samsonov_report(s, bad);
      FAIL("expected InvalidSpec");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidSpec);
    }
  }
}

TEST_CASE("samsonov_csv") {
  const SamsonovReport r = samsonov_report(spec_with(-1, 1, 40, 32), {32, 64});
  const std::string csv = samsonov_csv(r);
  const std::string header =
      "n,h,min_eig_G,gap_to_d2,residual_full,residual_interior,herm_residual_h,max_im_lambda_H,order_estimates\n";
  REQUIRE(csv.rfind(header, 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
  // first data row has no order estimates, second has all three
  const auto first = csv.substr(header.size(), csv.find('\n', header.size()) - header.size());
  CHECK(first.rfind("32,1.25,", 0) == 0);
  CHECK(first.back() == ',');
  CHECK(csv.find("gap=") != std::string::npos);
  CHECK(csv.find(";residual_full=") != std::string::npos);
  CHECK(csv.find(";herm_h=") != std::string::npos);
}
