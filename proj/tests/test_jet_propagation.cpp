#include "doctest.h"

#include "gjl/error.hpp"
#include "gjl/jet_propagation.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace gjl;
using std::numbers::pi;

namespace {

// Taylor coefficient of x^(2k) in sin^2 x.
double sin2_coeff(int k) {
  double f = 1.0;
  for (int i = 2; i <= 2 * k; ++i) f *= i;
  return (k % 2 == 1 ? 1.0 : -1.0) * std::pow(2.0, 2 * k - 1) / f;
}

// c (sin^2 x - sin^2 y) up to the given degree.
JetData diagonal_sin2(double c, int max_order) {
  JetData j;
  for (int d = 2; d <= max_order; d += 2) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d / 2 + 1);
    v[0] = c * sin2_coeff(d / 2);
    v[d / 2] = -c * sin2_coeff(d / 2);
    j[d] = v;
  }
  return j;
}

JetData quadratic(double a, double b) {
  JetData j;
  j[2] = Eigen::Vector2d(a, b);
  return j;
}

// Dense polynomial in x, y: c(i, j) multiplies x^i y^j.
using Dense = Eigen::MatrixXd;

Dense d_x(const Dense& p) {
  Dense r = Dense::Zero(p.rows(), p.cols());
  for (int i = 1; i < p.rows(); ++i) r.row(i - 1) = i * p.row(i);
  return r;
}

Dense d_y(const Dense& p) {
  Dense r = Dense::Zero(p.rows(), p.cols());
  for (int j = 1; j < p.cols(); ++j) r.col(j - 1) = j * p.col(j);
  return r;
}

Dense times(const Dense& a, const Dense& b, int size) {
  Dense r = Dense::Zero(size, size);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) {
      if (a(i, j) == 0.0) continue;
      for (int k = 0; k < b.rows() && i + k < size; ++k)
        for (int l = 0; l < b.cols() && j + l < size; ++l) r(i + k, j + l) += a(i, j) * b(k, l);
    }
  return r;
}

}  // namespace

TEST_CASE("mode solver examples") {
  const GridPtr g = TimeGrid::make(64);
  const CoefficientSeries zero = CoefficientSeries::constant(g, 0.0);

  ModeSolution lin = solve_mode({0.0, zero, 0.0, 1.0});
  CHECK(!lin.resonant);
  for (int i = 0; i < g->node_count(); ++i) CHECK(std::abs(lin.f[i] - g->node(i)) < 1e-13);

  ModeSolution cosine = solve_mode({pi * pi, zero, 1.0, -1.0});
  CHECK(cosine.resonant);
  CHECK(cosine.multiple == 1);
  CHECK(cosine.compatible);
  for (int i = 0; i < g->node_count(); ++i) CHECK(std::abs(cosine.f[i] - std::cos(pi * g->node(i))) < 1e-12);

  const CoefficientSeries sine = CoefficientSeries::sample(g, [](double t) { return std::sin(pi * t); });
  ModeSolution bad = solve_mode({pi * pi, sine, 0.0, 0.0});
  CHECK(bad.resonant);
  CHECK(!bad.compatible);
  CHECK(std::abs(bad.compatibility_defect) == doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-12));

  const ModeSolution near = solve_mode({std::pow(pi + 1e-7, 2), zero, 0.0, 0.0});
  CHECK(near.near_resonant);
  CHECK(!near.resonant);
}

TEST_CASE("mode solver residual on random problems") {
  const GridPtr g = TimeGrid::make(64);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> lam(0.0, 30.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double c1 = u(rng), c2 = u(rng), c3 = 3 * u(rng);
    const CoefficientSeries k =
        CoefficientSeries::sample(g, [=](double t) { return c1 + c2 * std::exp(t) * std::cos(c3 * t); });
    const ModeProblem p{lam(rng), k, u(rng), u(rng)};
    const ModeSolution s = solve_mode(p);
    REQUIRE(!s.resonant);
    CHECK(mode_residual(p, s.f) < 1e-7);
    CHECK(s.f.front() == doctest::Approx(p.f0).epsilon(1e-12));
    CHECK(std::abs(s.f.back() - p.f1) < 1e-12);
  }
  // Resonant with a compatible source: the solution satisfies the ODE.
  const CoefficientSeries k = CoefficientSeries::sample(g, [](double t) { return std::cos(2 * pi * t) + t; });
  const double defect_free_f1 = -(0.3 - [&] {
    const CoefficientSeries s = CoefficientSeries::sample(g, [](double t) { return std::sin(pi * t); });
    return integrate(k * s) / pi;
  }());
  const ModeProblem p{pi * pi, k, 0.3, defect_free_f1};
  const ModeSolution s = solve_mode(p);
  CHECK(s.resonant);
  CHECK(s.compatible);
  CHECK(mode_residual(p, s.f) < 1e-7);
  CHECK(std::abs(s.f.back() - p.f1) < 1e-10);
  const CoefficientSeries sin1 = CoefficientSeries::sample(g, [](double t) { return std::sin(pi * t); });
  CHECK(std::abs(integrate(s.f * sin1)) < 1e-13);
}

TEST_CASE("bilinear source vanishes on the quadratic part") {
  const GridPtr g = TimeGrid::make(32);
  const auto r = propagate(JetData{}, quadratic(0.1, -0.1), 2, g);
  const auto k = bilinear_source(r.hierarchy, 4);
  for (const auto& s : k) CHECK(s.max_abs() == 0.0);
}

TEST_CASE("bilinear source against a dense symbolic expansion") {
  const GridPtr g = TimeGrid::make(64);
  JetHierarchy h;
  h.grid = g;
  h.path2 = propagate(JetData{}, quadratic(0.12, -0.1), 2, g).hierarchy.path2;
  // Analytic degree-4 coefficients p_i(t) = alpha_i sin(beta_i t + gamma_i).
  const double alpha[] = {0.3, -0.7, 0.25}, beta[] = {1.3, 0.4, 2.1}, gamma[] = {0.2, -1.0, 0.7};
  std::vector<CoefficientSeries> p4;
  for (int i = 0; i < 3; ++i) {
    p4.push_back(CoefficientSeries::sample(g, [=](double t) { return alpha[i] * std::sin(beta[i] * t + gamma[i]); }));
  }
  h.orders[4] = p4;
  const auto k6 = bilinear_source(h, 6);

  std::mt19937_64 rng(2);
  std::uniform_int_distribution<int> pick(0, g->node_count() - 1);
  for (int trial = 0; trial < 5; ++trial) {
    const int node = pick(rng);
    const double t = g->node(node);
    Dense L = Dense::Zero(5, 5), L1 = Dense::Zero(5, 5), L2 = Dense::Zero(5, 5);
    for (int i = 0; i < 3; ++i) {
      const double ph = beta[i] * t + gamma[i];
      L(4 - 2 * i, 2 * i) = alpha[i] * std::sin(ph);
      L1(4 - 2 * i, 2 * i) = alpha[i] * beta[i] * std::cos(ph);
      L2(4 - 2 * i, 2 * i) = -alpha[i] * beta[i] * beta[i] * std::sin(ph);
    }
    const Dense lap = d_x(d_x(L)) + d_y(d_y(L));
    const Dense expr = -times(lap, L2, 9) + times(d_x(L1), d_x(L1), 9) + times(d_y(L1), d_y(L1), 9);
    for (int i = 0; i <= 3; ++i) CHECK(std::abs(k6[i][node] - expr(6 - 2 * i, 2 * i)) < 1e-9);
  }

  // Doubling a single order scales the bilinear part by 4.
  JetHierarchy h2 = h;
  for (auto& s : h2.orders[4]) s *= 2.0;
  const auto k6b = bilinear_source(h2, 6);
  for (int i = 0; i <= 3; ++i) CHECK((k6b[i] - 4.0 * k6[i]).max_abs() < 1e-12);

  JetHierarchy missing = h;
  missing.orders.clear();
  CHECK_THROWS_AS(bilinear_source(missing, 6), Error);
}

TEST_CASE("pure quadratic data propagates to a zero hierarchy") {
  const GridPtr g = TimeGrid::make(64);
  const double c = 0.5 * std::sin(pi / 12);
  const PropagationResult r = propagate(JetData{}, quadratic(c, -c), 10, g);
  CHECK(r.hierarchy.path2.epsilon == doctest::Approx(pi / 24).epsilon(1e-12));
  CHECK(!r.obstruction);
  CHECK(!r.beyond_proven_range);
  CHECK(r.hierarchy.max_order() == 10);
  for (const auto& [order, series] : r.hierarchy.orders) {
    for (const auto& s : series) CHECK(s.max_abs() == 0.0);
  }
}

TEST_CASE("resonance appears at the predicted order") {
  const GridPtr g = TimeGrid::make(64);
  for (int n = 3; n <= 6; ++n) {
    const double c = 0.5 * std::sin(pi / (2 * n));
    const PropagationResult r = propagate(JetData{}, diagonal_sin2(c, 2 * n + 4), 2 * n + 4, g);
    REQUIRE(r.obstruction);
    CHECK(r.obstruction->resonant_order == 2 * n);
    CHECK(r.obstruction->multiple == 1);
    CHECK(r.hierarchy.max_order() == 2 * n - 2);
    CHECK(!r.beyond_proven_range);
    double unorm = 0.0;
    for (double x : r.obstruction->u) unorm = std::max(unorm, std::abs(x));
    CHECK(unorm > 1e-12);
  }
}

TEST_CASE("propagated jets satisfy the frame-free order equation") {
  const GridPtr g = TimeGrid::make(64);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  // The second case has a' < 0 and exercises the axis swap.
  const std::pair<JetData, JetData> cases[] = {
      {quadratic(0.02, 0.05), quadratic(0.15, -0.08)},
      {quadratic(0.05, -0.02), quadratic(-0.1, 0.12)},
  };
  for (const auto& [q0, q1] : cases) {
    JetData phi0 = q0, phi1 = q1;
    for (int d = 4; d <= 10; d += 2) {
      Eigen::VectorXd a(d / 2 + 1), b(d / 2 + 1);
      for (int i = 0; i <= d / 2; ++i) {
        a[i] = u(rng);
        b[i] = u(rng);
      }
      phi0[d] = a;
      phi1[d] = b;
    }
    const PropagationResult r = propagate(phi0, phi1, 10, g);
    REQUIRE(!r.obstruction);
    for (int d = 4; d <= 10; d += 2) {
      const auto& s = r.hierarchy.orders.at(d);
      for (int i = 0; i <= d / 2; ++i) {
        CHECK(s[i].front() == phi0[d][i]);
        CHECK(s[i].back() == phi1[d][i]);
      }
      CHECK(order_residual(r.hierarchy, d) < 1e-6);
    }
    const PropagationResult again = propagate(phi0, phi1, 10, g);
    for (int d = 4; d <= 10; d += 2)
      for (int i = 0; i <= d / 2; ++i)
        CHECK((again.hierarchy.orders.at(d)[i].values().array() == r.hierarchy.orders.at(d)[i].values().array()).all());
  }
}

TEST_CASE("order residual stays small relative to the source for large jets") {
  const GridPtr g = TimeGrid::make(64);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  JetData phi0 = quadratic(0.02, 0.05), phi1 = quadratic(0.15, -0.08);
  for (int d = 4; d <= 10; d += 2) {
    Eigen::VectorXd a(d / 2 + 1), b(d / 2 + 1);
    for (int i = 0; i <= d / 2; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
    }
    phi0[d] = a;
    phi1[d] = b;
  }
  const PropagationResult r = propagate(phi0, phi1, 10, g);
  for (int d = 6; d <= 10; d += 2) {
    double scale = 1.0;
    for (const auto& s : bilinear_source(r.hierarchy, d)) scale = std::max(scale, s.max_abs());
    CHECK(order_residual(r.hierarchy, d) < 1e-8 * scale);
  }
}

TEST_CASE("U round trip at every node") {
  const GridPtr g = TimeGrid::make(64);
  const PropagationResult r = propagate(JetData{}, quadratic(0.15, -0.08), 2, g);
  const PolyBasis ee = PolyBasis::even(6);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::VectorXd p(7);
  for (int i = 0; i < 7; ++i) p[i] = u(rng);
  for (int i = 0; i < g->node_count(); ++i) {
    const Eigen::VectorXd ev = u_eigenvalues(ee, (*r.hierarchy.path2.A)[i]);
    CHECK((ev.cwiseProduct(p.cwiseQuotient(ev)) - p).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("compatibility condition") {
  const GridPtr g = TimeGrid::make(64);
  const int n = 3;
  const double c = 0.5 * std::sin(pi / (2 * n));

  SUBCASE("quadratic data with no higher jets is compatible") {
    const PropagationResult r = propagate(JetData{}, quadratic(c, -c), 2 * n, g);
    REQUIRE(r.obstruction);
    CHECK(r.obstruction->lhs == 0.0);
    CHECK(std::abs(r.obstruction->K) < 1e-14);
    CHECK(r.obstruction->satisfied);
  }

  SUBCASE("a top-order perturbation shifts lhs by the weight times factorials") {
    const JetData phi1 = diagonal_sin2(c, 2 * n);
    const PropagationResult base = propagate(JetData{}, phi1, 2 * n, g);
    REQUIRE(base.obstruction);
    const ObstructionReport& o = *base.obstruction;
    // Check against the resonant mode's own defect.
    for (int kappa = 0; kappa <= n; ++kappa) {
      for (double chi : {std::exp(-3.0), 2 * std::exp(-3.0)}) {
        JetData pert = phi1;
        pert[2 * n][kappa] += chi;
        const ObstructionReport p = compatibility_check(JetData{}, pert, base.hierarchy, 2 * n);
        CHECK(p.K == o.K);
        CHECK(p.u == o.u);
        CHECK(p.v == o.v);
        const double expect = o.u[kappa] * std::tgamma(2 * n - 2 * kappa + 1) * std::tgamma(2 * kappa + 1) * chi;
        CHECK((p.lhs - o.lhs) == doctest::Approx(expect).epsilon(1e-12));
      }
    }
  }

  SUBCASE("non-resonant order is rejected") {
    const PropagationResult r = propagate(JetData{}, quadratic(c, -c), 4, g);
    CHECK_THROWS_AS(compatibility_check(JetData{}, quadratic(c, -c), r.hierarchy, 4), Error);
  }
}

TEST_CASE("resonant defect matches lhs minus K") {
  const GridPtr g = TimeGrid::make(64);
  const int n = 4;
  const double c = 0.5 * std::sin(pi / (2 * n));
  JetData phi0 = quadratic(0.0, 0.0);
  phi0[4] = Eigen::Vector3d(0.1, -0.2, 0.05);
  const PropagationResult r = propagate(phi0, diagonal_sin2(c, 2 * n), 2 * n, g);
  REQUIRE(r.obstruction);
  const ObstructionReport& o = *r.obstruction;
  CHECK(std::abs(o.K) > 1e-6);
  CHECK(o.residual == doctest::Approx(std::abs(o.lhs - o.K)));
  CHECK(o.v.size() == static_cast<size_t>(n + 1));
}

TEST_CASE("orders beyond the proven range and a second resonance") {
  const GridPtr g = TimeGrid::make(64);
  // eps = pi / 10: 4 eps * 3 > pi, and 4 eps * 5 = 2 pi.
  const double c = 0.5 * std::sin(pi / 5);
  const PropagationResult r = propagate(JetData{}, diagonal_sin2(c, 12), 12, g);
  CHECK(r.hierarchy.path2.epsilon == doctest::Approx(pi / 10).epsilon(1e-12));
  CHECK(r.beyond_proven_range);
  CHECK(!r.warnings.empty());
  REQUIRE(r.obstruction);
  CHECK(r.obstruction->resonant_order == 10);
  CHECK(r.obstruction->multiple == 2);
  for (int d = 4; d <= 8; d += 2) CHECK(order_residual(r.hierarchy, d) < 1e-6);
}

TEST_CASE("stationary 2-jets") {
  const GridPtr g = TimeGrid::make(32);
  const PropagationResult zero = propagate(JetData{}, JetData{}, 8, g);
  CHECK(!zero.obstruction);
  for (int d = 4; d <= 8; d += 2)
    for (const CoefficientSeries& s : zero.hierarchy.at(d)) CHECK(s.values().cwiseAbs().maxCoeff() == 0.0);

  JetData phi0 = quadratic(0.1, -0.05), phi1 = quadratic(0.1, -0.05);
  phi0[4] = Eigen::Vector3d(0.02, -0.01, 0.03);
  phi1[4] = Eigen::Vector3d(-0.04, 0.02, 0.01);
  phi1[6] = Eigen::Vector4d(0.01, 0.0, -0.02, 0.005);
  const PropagationResult r = propagate(phi0, phi1, 10, g);
  CHECK(r.hierarchy.path2.causal_class == CausalClass::Stationary);
  CHECK(!r.obstruction);
  for (int d = 4; d <= 10; d += 2) CHECK(order_residual(r.hierarchy, d) < 1e-9);
  // Degree 4 has no source, so its coefficients are linear in t.
  const CoefficientSeries c = r.hierarchy.at(4)[0];
  for (int i = 0; i < c.size(); ++i) {
    const double t = g->node(i);
    CHECK(c[i] == doctest::Approx(0.02 * (1 - t) - 0.04 * t).epsilon(1e-12));
  }
}

TEST_CASE("invalid propagation inputs") {
  const GridPtr g = TimeGrid::make(32);
  // Time-like and light-like 2-jets.
  CHECK_THROWS_AS(propagate(JetData{}, quadratic(0.1, 0.1), 4, g), Error);
  CHECK_THROWS_AS(propagate(JetData{}, quadratic(0.1, 0.0), 4, g), Error);
  try {
    propagate(JetData{}, quadratic(0.1, 0.1), 4, g);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
  JetData odd = quadratic(0.1, -0.1);
  odd[3] = Eigen::Vector4d(0, 1, 0, 0);
  CHECK_THROWS_AS(propagate(JetData{}, odd, 4, g), Error);
  JetData mixed = quadratic(0.1, -0.1);
  mixed[4] = (Eigen::VectorXd(5) << 1, 0.5, 0, 0, 0).finished();
  try {
    propagate(JetData{}, mixed, 4, g);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
  CHECK_THROWS_AS(propagate(JetData{}, quadratic(0.1, -0.1), 5, g), Error);
}
