#include "doctest.h"

#include "gjl/error.hpp"
#include "gjl/poly_ops.hpp"
#include "poly_oracle_check.hpp"

#include <cmath>
#include <random>

using namespace gjl;

namespace {

PolyVector monomial(const PolyBasis& b, int x_exponent) {
  PolyVector v{b, Eigen::VectorXd::Zero(b.dimension())};
  v.coeffs[b.index_of(x_exponent)] = 1.0;
  return v;
}

double coeff(const PolyVector& v, int x_exponent) { return v.coeffs[v.basis.index_of(x_exponent)]; }

}  // namespace

TEST_CASE("bases are ordered by descending x exponent") {
  const PolyBasis e = PolyBasis::even(3);
  const PolyBasis f = PolyBasis::full(3);
  CHECK(e.dimension() == 4);
  CHECK(f.dimension() == 7);
  CHECK(e.monomials().front() == std::pair{6, 0});
  CHECK(e.monomials().back() == std::pair{0, 6});
  for (int i = 1; i < f.dimension(); ++i) CHECK(f.monomials()[i].first == f.monomials()[i - 1].first - 1);
  CHECK(e.index_of(3) == -1);
  CHECK_THROWS_AS(PolyBasis::even(0), Error);
  CHECK_THROWS_AS(boost(0), Error);
}

TEST_CASE("boost on quadratics") {
  const PolyOperator b = boost(1);
  const PolyVector bx2 = b.apply(monomial(b.domain, 2));
  CHECK(coeff(bx2, 1) == 2.0);
  CHECK(bx2.coeffs.cwiseAbs().sum() == 2.0);
  const PolyVector bxy = b.apply(monomial(b.domain, 1));
  CHECK(coeff(bxy, 2) == 1.0);
  CHECK(coeff(bxy, 0) == 1.0);
  CHECK(coeff(b.apply(monomial(b.domain, 0)), 1) == 2.0);
}

TEST_CASE("boost maps even-even monomials to odd-odd ones") {
  const PolyOperator b = boost(4);
  for (int c = 0; c < b.domain.dimension(); ++c) {
    const bool even_col = b.domain.monomials()[c].first % 2 == 0;
    for (int r = 0; r < b.codomain.dimension(); ++r) {
      const bool even_row = b.codomain.monomials()[r].first % 2 == 0;
      if (even_col == even_row) CHECK(b.matrix(r, c) == 0.0);
    }
  }
}

TEST_CASE("boost scales powers of x + y by their degree") {
  // (x+y)^4 in the full basis of degree 4.
  const PolyBasis f = PolyBasis::full(2);
  PolyVector p{f, Eigen::VectorXd(5)};
  p.coeffs << 1, 4, 6, 4, 1;
  const PolyVector bp = boost(2).apply(p);
  CHECK((bp.coeffs - 4.0 * p.coeffs).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("boost squared for n = 1") {
  const PolyOperator b2 = boost_squared(1);
  Eigen::Matrix2d expect;
  expect << 2, 2, 2, 2;
  CHECK((b2.matrix - expect).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::VectorXd ev = boost_squared_spectrum(1);
  CHECK(ev[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(ev[1] == doctest::Approx(4.0));
  const auto q = eigenbasis_q(1);
  CHECK((b2.apply(q[1]).coeffs - 4.0 * q[1].coeffs).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("boost squared spectrum is (2k)^2") {
  for (int n = 1; n <= 10; ++n) {
    const Eigen::VectorXd ev = boost_squared_spectrum(n);
    REQUIRE(ev.size() == n + 1);
    for (int k = 0; k <= n; ++k) CHECK(std::abs(ev[k] - 4.0 * k * k) < 1e-9);
  }
  const Eigen::VectorXd ev4 = boost_squared_spectrum(4);
  const double expect[] = {0, 4, 16, 36, 64};
  for (int k = 0; k <= 4; ++k) CHECK(ev4[k] == doctest::Approx(expect[k]).epsilon(1e-12));
}

TEST_CASE("q eigenbasis") {
  const auto q1 = eigenbasis_q(1);
  CHECK(coeff(q1[0], 2) == 2.0);
  CHECK(coeff(q1[0], 0) == -2.0);
  CHECK(coeff(q1[1], 2) == 2.0);
  CHECK(coeff(q1[1], 0) == 2.0);
  const auto q2 = eigenbasis_q(2);
  CHECK(coeff(q2[2], 4) == 2.0);
  CHECK(coeff(q2[2], 2) == 12.0);
  CHECK(coeff(q2[2], 0) == 2.0);

  for (int n = 1; n <= 12; ++n) {
    const auto q = eigenbasis_q(n);
    const PolyOperator b2 = boost_squared(n);
    Eigen::MatrixXd m(n + 1, n + 1);
    for (int k = 0; k <= n; ++k) {
      m.col(k) = q[k].coeffs / q[k].coeffs.cwiseAbs().maxCoeff();
      const Eigen::VectorXd r = b2.matrix * q[k].coeffs - 4.0 * k * k * q[k].coeffs;
      CHECK(r.cwiseAbs().maxCoeff() <= 1e-12 * q[k].coeffs.cwiseAbs().maxCoeff() * (4.0 * n * n + 1));
    }
    CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(m).rank() == n + 1);
  }
}

TEST_CASE("E_A and S_A") {
  const PolyOperator e = op_EA(1, 1.0);
  const PolyVector ex2 = e.apply(monomial(e.domain, 2));
  CHECK(coeff(ex2, 2) == doctest::Approx(2.0));
  CHECK(coeff(ex2, 0) == doctest::Approx(2.0));

  const double A = 1.7;
  const PolyOperator s = op_SA(3, A);
  for (int i = 0; i < s.domain.dimension(); ++i) {
    const auto [j, k] = s.domain.monomials()[i];
    CHECK(s.matrix(i, i) == doctest::Approx(A * j - k / A));
    CHECK(s.matrix.row(i).cwiseAbs().sum() == doctest::Approx(std::abs(A * j - k / A)));
  }

  // S_A S_A against its expanded second-order form.
  const int n = 3;
  const PolyBasis ee = PolyBasis::even(n);
  const PolyOperator expanded = differential_operator(
      ee, ee,
      {{A * A, 2, 0, 2, 0}, {1 / (A * A), 0, 2, 0, 2}, {-2.0, 1, 1, 1, 1}, {A * A, 1, 0, 1, 0}, {1 / (A * A), 0, 1, 0, 1}});
  CHECK(((s * s).matrix - expanded.matrix).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(op_EA(2, 0.0), Error);
  CHECK_THROWS_AS(op_SA(2, -1.0), Error);
}

TEST_CASE("U eigenvalues") {
  const PolyOperator u = op_U(2, 1.0);
  CHECK(u.matrix(u.domain.index_of(2), u.domain.index_of(2)) == doctest::Approx(4.0));
  CHECK(u.matrix(u.domain.index_of(4), u.domain.index_of(4)) == doctest::Approx(4.0));
  CHECK_THROWS_AS(op_U(2, 0.0), Error);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logA(std::log(0.05), std::log(20.0));
  for (int trial = 0; trial < 50; ++trial) {
    const double A = std::exp(logA(rng));
    const PolyOperator m = op_U(5, A);
    CHECK(m.matrix.diagonal().minCoeff() > 0.0);
    const Eigen::MatrixXd inv = m.matrix.diagonal().cwiseInverse().asDiagonal();
    CHECK((m.matrix * inv - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("conjugation identity") {
  CHECK(conjugation_identity_residual(2, 1.0) < 1e-13);
  CHECK(conjugation_identity_residual(5, 7.3) < 1e-10);

  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> pick_n(1, 8);
  std::uniform_real_distribution<double> logA(std::log(0.05), std::log(20.0));
  for (int trial = 0; trial < 100; ++trial) {
    const int n = pick_n(rng);
    const double A = std::exp(logA(rng));
    CHECK(conjugation_identity_residual(n, A) < 1e-9);
  }

  // Without U the twisted boost differs from the boost.
  const PolyOperator twisted = twisted_boost(3, 2.0);
  CHECK((twisted.matrix - boost(3).matrix).cwiseAbs().maxCoeff() > 0.1);
}

TEST_CASE("Dtilde coefficients") {
  const auto nu1 = dtilde_coefficients(1);
  CHECK(nu1[0] == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(nu1[1] == doctest::Approx(0.125).epsilon(1e-14));

  for (int n = 1; n <= 8; ++n) {
    const auto q = eigenbasis_q(n);
    for (int k = 0; k <= n; ++k) CHECK(std::abs(apply_dtilde(n, q[k]) - (k == n ? 1.0 : 0.0)) < 1e-10);
  }
}

TEST_CASE("D of U g equals Dtilde of g") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> logA(std::log(0.1), std::log(10.0));
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 6;
    const double A = std::exp(logA(rng));
    const PolyBasis ee = PolyBasis::even(n);
    PolyVector g{ee, Eigen::VectorXd(ee.dimension())};
    for (int i = 0; i < ee.dimension(); ++i) g.coeffs[i] = coef(rng);
    const PolyVector ug = op_U(n, A).apply(g);
    CHECK(apply_d_operator(n, A, ug) == doctest::Approx(apply_dtilde(n, g)).epsilon(1e-10));
  }

  const int n = 4;
  const double A = 0.6;
  const auto q = eigenbasis_q(n);
  const PolyOperator u = op_U(n, A);
  for (int k = 0; k <= n; ++k) {
    const double d = apply_d_operator(n, A, u.apply(q[k]));
    CHECK(std::abs(d - (k == n ? 1.0 : 0.0)) < 1e-10);
  }
  CHECK(apply_d_operator(n, A, PolyVector{PolyBasis::even(n), Eigen::VectorXd::Zero(n + 1)}) == 0.0);
  CHECK_THROWS_AS(apply_d_operator(3, A, u.apply(q[0])), Error);
}

TEST_CASE("D weights at A = 1 are Dtilde scaled by 2^-n") {
  for (int n = 1; n <= 6; ++n) {
    const auto nu = dtilde_coefficients(n);
    const auto w = d_operator_weights(n, 1.0);
    for (int j = 0; j <= n; ++j) CHECK(w[j] == doctest::Approx(nu[j] * std::pow(2.0, -n)));
  }
}

TEST_CASE("q coordinates round trip") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int n = 1; n <= 12; ++n) {
    const QBasis qb(n);
    Eigen::VectorXd f(n + 1);
    for (int k = 0; k <= n; ++k) f[k] = coef(rng);
    const Eigen::VectorXd p = qb.combine(f);
    CHECK((qb.coordinates(p) - f).cwiseAbs().maxCoeff() < 1e-10);
    // Top coordinate agrees with Dtilde.
    CHECK(apply_dtilde(n, PolyVector{qb.basis(), p}) == doctest::Approx(f[n]).epsilon(1e-9));
  }
}

TEST_CASE("homogeneous calculus") {
  // p = x^3 y + 2 y^4
  Homogeneous p = Homogeneous::zero(4);
  p.c[3] = 1;
  p.c[0] = 2;
  const Homogeneous lap = p.laplacian();  // 6xy + 24y^2
  CHECK(lap.degree == 2);
  CHECK(lap.c[1] == 6.0);
  CHECK(lap.c[0] == 24.0);
  CHECK(lap.c[2] == 0.0);
  const Homogeneous px = p.dx(), py = p.dy();
  CHECK(px.c[2] == 3.0);
  CHECK(py.c[3] == 1.0);
  CHECK(py.c[0] == 8.0);
  const Homogeneous sq = px * py;  // 3x^2y (x^3 + 8 y^3)
  CHECK(sq.degree == 6);
  CHECK(sq.c[5] == 3.0);
  CHECK(sq.c[2] == 24.0);
  CHECK(Homogeneous::zero(0).dx().c.size() == 0);
}

TEST_CASE("exact rational oracle for n <= 4") {
  const std::vector<mpq_class> As{mpq_class(1), mpq_class(3, 2), mpq_class(2, 7), mpq_class(5)};
  for (int n = 1; n <= 4; ++n) {
    const rational::Mismatch mm = rational::check_all(n, As);
    INFO(mm.where);
    CHECK(mm.worst < 1e-13);
  }
}
