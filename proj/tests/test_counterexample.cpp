#include "doctest.h"

#include "gjl/counterexample.hpp"
#include "gjl/error.hpp"

#include <gmpxx.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace gjl;
using std::numbers::pi;

namespace {

// Exact Taylor coefficients of sin u by the factorial formula, then squared
// term by term.
std::vector<mpq_class> sin_squared_oracle(int degree) {
  std::vector<mpq_class> s(degree + 1, 0);
  mpz_class fact = 1;
  for (int k = 1; k <= degree; ++k) {
    fact *= k;
    if (k % 2 == 1) s[k] = mpq_class(((k / 2) % 2 == 0 ? 1 : -1), 1) / mpq_class(fact);
  }
  std::vector<mpq_class> sq(degree + 1, 0);
  for (int i = 0; i <= degree; ++i)
    for (int j = 0; i + j <= degree; ++j) sq[i + j] += s[i] * s[j];
  return sq;
}

}  // namespace

TEST_CASE("h_n family") {
  const TorusPotential h3 = build_h(3);
  REQUIRE(h3.terms.size() == 2);
  CHECK(h3.terms[0].coeff == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(h3.value(0.0, 0.0) == 0.0);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int n = 3; n <= 8; ++n) {
    const TorusPotential h = build_h(n);
    for (int i = 0; i < 10; ++i) {
      const double x = u(rng), y = u(rng);
      CHECK(h.value(x, y) == doctest::Approx(-h.value(y, x)));
      CHECK(h.value(x, y) == doctest::Approx(h.value(-x, y)));
    }
  }
  CHECK_THROWS_AS(build_h(2), Error);
}

TEST_CASE("h~_n family") {
  const TorusPotential t = build_h_tilde(3, 1, std::exp(-3.0));
  REQUIRE(t.terms.size() == 3);
  CHECK(t.terms[2].coeff == std::exp(-3.0));
  CHECK(t.terms[2].sin_x_power == 4);
  CHECK(t.terms[2].sin_y_power == 2);
  CHECK(t.family->kappa == 1);
  CHECK_THROWS_AS(build_h_tilde(3, 1, 0.0), Error);
  CHECK_THROWS_AS(build_h_tilde(3, 4, 1.0), Error);
  CHECK_THROWS_AS(build_h_tilde(3, -1, 1.0), Error);
  CHECK_THROWS_AS(make_potential({{1.0, 1, 0}}), Error);
  CHECK_THROWS_AS(make_potential({{1.0, 0, 0}}), Error);
}

TEST_CASE("Taylor series of sin^2") {
  const auto s = sin_power_series(2, 6);
  CHECK(s[2] == "1");
  CHECK(s[4] == "-1/3");
  CHECK(s[6] == "2/45");
  const auto oracle = sin_squared_oracle(24);
  const auto full = sin_power_series(2, 24);
  for (int k = 0; k <= 24; ++k) CHECK(full[k] == oracle[k].get_str());

  // sin^4 = (sin^2)^2 against the oracle squared.
  const auto s4 = sin_power_series(4, 12);
  for (int d = 0; d <= 12; ++d) {
    mpq_class expect = 0;
    for (int i = 0; i <= d; ++i) expect += oracle[i] * oracle[d - i];
    CHECK(s4[d] == expect.get_str());
  }
  TorusPotential sx = make_potential({{1.0, 2, 0}});
  const JetData j = jets_at_origin(sx, 6);
  CHECK(j.at(2)[0] == 1.0);
  CHECK(j.at(4)[0] == mpq_class(-1, 3).get_d());
  CHECK(j.at(6)[0] == mpq_class(2, 45).get_d());
  CHECK(j.at(6)[3] == 0.0);
}

TEST_CASE("jets of the family") {
  const JetData h3 = jets_at_origin(build_h(3), 6);
  CHECK(h3.at(2)[0] == doctest::Approx(0.25));
  CHECK(h3.at(2)[1] == doctest::Approx(-0.25));

  for (int n = 3; n <= 6; ++n) {
    for (int kappa = 0; kappa <= n; ++kappa) {
      const double chi = std::exp(-static_cast<double>(n));
      const JetData a = jets_at_origin(build_h(n), 2 * n + 2);
      const JetData b = jets_at_origin(build_h_tilde(n, kappa, chi), 2 * n + 2);
      for (int d = 2; d < 2 * n; d += 2) CHECK((a.at(d) - b.at(d)).cwiseAbs().maxCoeff() == 0.0);
      Eigen::VectorXd diff = b.at(2 * n) - a.at(2 * n);
      CHECK(diff[kappa] == doctest::Approx(chi).epsilon(1e-14));
      diff[kappa] = 0.0;
      CHECK(diff.cwiseAbs().maxCoeff() < 1e-18);
    }
  }

  // Swapping the axes of h_n negates it: reversed coefficient lists change sign.
  const JetData h = jets_at_origin(build_h(5), 10);
  for (const auto& [d, c] : h) CHECK((c.reverse() + c).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(jets_at_origin(build_h(3), 5), Error);
}

TEST_CASE("C^B norm estimates") {
  CHECK(cb_norm_report(TorusPotential{}, 4) == 0.0);
  for (int n = 3; n <= 12; ++n) {
    const double n0 = cb_norm_report(build_h(n), 0);
    CHECK(n0 <= std::sin(pi / (2 * n)) + 1e-15);
    CHECK(n0 == doctest::Approx(0.5 * std::sin(pi / (2 * n))));
  }
  // d^2/dx^2 sin^2 x = 2 cos 2x, so |sin^2 x|_2 = 2.
  CHECK(cb_norm_report(make_potential({{1.0, 2, 0}}), 2) == doctest::Approx(2.0));
  // sin^2 x sin^2 y: d_x^2 d_y^2 gives 4 cos 2x cos 2y, d_x^4 gives -8 cos 2x sin^2 y.
  CHECK(cb_norm_report(make_potential({{1.0, 2, 2}}), 4) == doctest::Approx(8.0));
  CHECK(cb_norm_report(make_potential({{1.0, 2, 2}}), 3) == doctest::Approx(4.0));
  double prev = INFINITY;
  for (int n = 10; n <= 20; ++n) {
    const double v = cb_norm_report(build_h(n), 10);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS(cb_norm_report(build_h(3), -1), Error);
}

TEST_CASE("obstruction demo") {
  const GridPtr g = TimeGrid::make(64);
  for (int n = 3; n <= 6; ++n) {
    const ObstructionDemo d = obstruction_demo(n, g);
    CHECK(d.epsilon_ok);
    CHECK(std::abs(d.epsilon - pi / (4 * n)) < 1e-10);
    CHECK(d.resonant_order == 2 * n);
    double vmax = 0.0;
    int arg = 0;
    for (int i = 0; i <= n; ++i) {
      if (std::abs(d.v[i]) > vmax) {
        vmax = std::abs(d.v[i]);
        arg = i;
      }
    }
    CHECK(d.kappa == arg);
    CHECK(vmax > 1e-12);
    CHECK(d.chi == std::exp(-static_cast<double>(n)));
    CHECK(d.shared_data_gap < 1e-10);
    CHECK(d.lhs_difference == doctest::Approx(d.predicted_difference).epsilon(1e-12));
    CHECK(!d.conclusion.empty());
  }
}

TEST_CASE("epsilon of the family") {
  for (int n = 3; n <= 12; ++n) {
    const double c = 0.5 * std::sin(pi / (2 * n));
    CHECK(std::abs(epsilon_from_boundary({0.0, 0.0, c, -c}) - pi / (4 * n)) < 1e-10);
  }
}
