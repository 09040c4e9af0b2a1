#include "gjl/counterexample.hpp"

#include "gjl/error.hpp"
#include "gjl/poly_ops.hpp"

#include <gmpxx.h>

#include <cmath>
#include <numbers>
#include <sstream>

namespace gjl {
namespace {

using std::numbers::pi;

// Taylor coefficients of sin^2 u up to u^max_degree:
// sin^2 u = sum_{k>=1} (-1)^(k+1) 2^(2k-1) u^(2k) / (2k)!.
std::vector<mpq_class> sin2_series(int max_degree) {
  std::vector<mpq_class> s(max_degree + 1, 0);
  mpz_class fact = 1;
  mpz_class pow2 = 2;  // 2^(2k-1) at k = 1
  for (int k = 1; 2 * k <= max_degree; ++k) {
    fact *= (2 * k - 1) * (2 * k);
    mpq_class term(pow2, fact);
    term.canonicalize();
    s[2 * k] = (k % 2 == 1) ? term : mpq_class(-term);
    pow2 *= 4;
  }
  return s;
}

std::vector<mpq_class> multiply(const std::vector<mpq_class>& a, const std::vector<mpq_class>& b, int max_degree) {
  std::vector<mpq_class> r(max_degree + 1, 0);
  for (int i = 0; i <= max_degree; ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; i + j <= max_degree; ++j) {
      if (b[j] != 0) r[i + j] += a[i] * b[j];
    }
  }
  return r;
}

// sin^p u, p even.
std::vector<mpq_class> sin_power(int p, int max_degree) {
  std::vector<mpq_class> r(max_degree + 1, 0);
  r[0] = 1;
  const std::vector<mpq_class> s2 = sin2_series(max_degree);
  for (int i = 0; i < p / 2; ++i) r = multiply(r, s2, max_degree);
  return r;
}

// Cosine expansion sin^p x = sum_k c_k cos(2 k x), p even.
std::vector<double> sin_power_cosines(int p) {
  const int h = p / 2;
  std::vector<double> c(h + 1);
  const double scale = std::ldexp(1.0, -p);
  c[0] = scale * binomial(p, h);
  for (int k = 1; k <= h; ++k) c[k] = 2.0 * scale * binomial(p, h - k) * (k % 2 == 0 ? 1.0 : -1.0);
  return c;
}

// Samples of d^alpha/dx^alpha sin^p x at x_i = 2 pi i / samples.
Eigen::VectorXd sin_power_derivative(int p, int alpha, int samples) {
  const std::vector<double> c = sin_power_cosines(p);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(samples);
  const double shift = alpha * pi / 2;
  for (int k = 0; k < static_cast<int>(c.size()); ++k) {
    if (k == 0 && alpha > 0) continue;
    const double amp = c[k] * std::pow(2.0 * k, alpha);
    for (int i = 0; i < samples; ++i) out[i] += amp * std::cos(2.0 * k * (2 * pi * i / samples) + shift);
  }
  return out;
}

void require_family_n(int n) {
  if (n < 3) fail(ErrorKind::InvalidArgument, "family index n must be >= 3, got " + std::to_string(n));
}

}  // namespace

double TorusPotential::value(double x, double y) const {
  double s = 0.0;
  for (const TrigTerm& t : terms) s += t.coeff * std::pow(std::sin(x), t.sin_x_power) * std::pow(std::sin(y), t.sin_y_power);
  return s;
}

TorusPotential make_potential(std::vector<TrigTerm> terms) {
  for (const TrigTerm& t : terms) {
    if (!std::isfinite(t.coeff)) fail(ErrorKind::InvalidArgument, "potential coefficient is not finite");
    if (t.sin_x_power < 0 || t.sin_y_power < 0 || t.sin_x_power % 2 != 0 || t.sin_y_power % 2 != 0) {
      fail(ErrorKind::InvalidArgument, "sine powers must be even and nonnegative so the potential is even");
    }
    if (t.sin_x_power == 0 && t.sin_y_power == 0 && t.coeff != 0.0) {
      fail(ErrorKind::InvalidArgument, "constant terms are not allowed: potentials vanish at the origin");
    }
  }
  return TorusPotential{std::move(terms), std::nullopt};
}

TorusPotential build_h(int n) {
  require_family_n(n);
  const double c = 0.5 * std::sin(pi / (2 * n));
  TorusPotential p = make_potential({{c, 2, 0}, {-c, 0, 2}});
  p.family = FamilyInfo{n, std::nullopt, std::nullopt};
  return p;
}

TorusPotential build_h_tilde(int n, int kappa, double chi) {
  require_family_n(n);
  if (kappa < 0 || kappa > n) {
    fail(ErrorKind::InvalidArgument, "kappa must lie in [0, " + std::to_string(n) + "], got " + std::to_string(kappa));
  }
  if (chi == 0.0 || !std::isfinite(chi)) fail(ErrorKind::InvalidArgument, "chi must be finite and nonzero");
  TorusPotential p = build_h(n);
  p.terms.push_back({chi, 2 * n - 2 * kappa, 2 * kappa});
  p.family = FamilyInfo{n, kappa, chi};
  return p;
}

std::vector<std::string> sin_power_series(int p, int max_degree) {
  if (p < 0 || p % 2 != 0) fail(ErrorKind::InvalidArgument, "sine power must be even and nonnegative");
  if (max_degree < 0) fail(ErrorKind::InvalidArgument, "series degree must be nonnegative");
  std::vector<std::string> out;
  for (const mpq_class& q : sin_power(p, max_degree)) out.push_back(q.get_str());
  return out;
}

JetData jets_at_origin(const TorusPotential& potential, int order) {
  if (order < 2 || order % 2 != 0) {
    fail(ErrorKind::InvalidArgument, "jet order must be even and >= 2, got " + std::to_string(order));
  }
  JetData jets;
  for (int d = 2; d <= order; d += 2) jets[d] = Eigen::VectorXd::Zero(d / 2 + 1);
  for (const TrigTerm& t : potential.terms) {
    const std::vector<mpq_class> sx = sin_power(t.sin_x_power, order);
    const std::vector<mpq_class> sy = sin_power(t.sin_y_power, order);
    for (int i = 0; i <= order; i += 2) {
      if (sx[i] == 0) continue;
      for (int j = 0; i + j <= order; j += 2) {
        if (sy[j] == 0 || i + j < 2) continue;
        const mpq_class prod = sx[i] * sy[j];
        // Even-even index of x^i y^j at degree i + j counts down from x^(i+j).
        jets[i + j][j / 2] += t.coeff * prod.get_d();
      }
    }
  }
  return jets;
}

double cb_norm_report(const TorusPotential& potential, int B, int samples) {
  if (B < 0) fail(ErrorKind::InvalidArgument, "derivative order B must be nonnegative");
  if (samples < 2) fail(ErrorKind::InvalidArgument, "norm grid needs at least 2 samples per axis");
  // Per term, derivative samples along each axis.
  struct Tables {
    double coeff;
    std::vector<Eigen::VectorXd> dx, dy;
  };
  std::vector<Tables> tables;
  for (const TrigTerm& t : potential.terms) {
    if (t.coeff == 0.0) continue;
    Tables tb{t.coeff, {}, {}};
    for (int a = 0; a <= B; ++a) {
      tb.dx.push_back(sin_power_derivative(t.sin_x_power, a, samples));
      tb.dy.push_back(sin_power_derivative(t.sin_y_power, a, samples));
    }
    tables.push_back(std::move(tb));
  }
  double worst = 0.0;
  Eigen::MatrixXd field(samples, samples);
  for (int a = 0; a <= B; ++a) {
    for (int b = 0; a + b <= B; ++b) {
      field.setZero();
      for (const Tables& tb : tables) field.noalias() += tb.coeff * tb.dx[a] * tb.dy[b].transpose();
      worst = std::max(worst, field.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

ObstructionDemo obstruction_demo(int n, const GridPtr& grid) {
  require_family_n(n);
  ObstructionDemo demo;
  demo.n = n;
  const int order = 2 * n;

  const JetData zero;
  const TorusPotential h = build_h(n);
  const PropagationResult base = propagate(zero, jets_at_origin(h, order), order, grid);
  demo.epsilon = base.hierarchy.path2.epsilon;
  demo.epsilon_expected = pi / (4 * n);
  demo.epsilon_ok = std::abs(demo.epsilon - demo.epsilon_expected) <= 1e-10;
  if (!base.obstruction) {
    fail(ErrorKind::Numeric, "no resonance detected up to degree " + std::to_string(order));
  }
  demo.h_report = *base.obstruction;
  demo.resonant_order = demo.h_report.resonant_order;
  if (demo.resonant_order != order) {
    fail(ErrorKind::Numeric, "resonance found at degree " + std::to_string(demo.resonant_order) + " instead of " +
                                 std::to_string(order));
  }

  // phi0 = 0, so the weights that matter act on h.
  demo.v = demo.h_report.u;
  int kappa = 0;
  for (int i = 1; i <= n; ++i) {
    if (std::abs(demo.v[i]) > std::abs(demo.v[kappa])) kappa = i;
  }
  // The raw-derivative weights shrink like 1/(2n)!; compare with the Dtilde scale.
  double nu_scale = 0.0;
  for (double x : dtilde_coefficients(n)) nu_scale = std::max(nu_scale, std::abs(x));
  if (!(std::abs(demo.v[kappa]) > 1e-12 * nu_scale)) {
    fail(ErrorKind::Internal, "all compatibility weights vanish at degree " + std::to_string(order));
  }
  demo.kappa = kappa;
  demo.v_kappa = demo.v[kappa];
  demo.chi = std::exp(-static_cast<double>(n));

  const TorusPotential ht = build_h_tilde(n, kappa, demo.chi);
  const PropagationResult pert = propagate(zero, jets_at_origin(ht, order), order, grid);
  if (!pert.obstruction || pert.obstruction->resonant_order != order) {
    fail(ErrorKind::Numeric, "perturbed potential did not resonate at degree " + std::to_string(order));
  }
  demo.h_tilde_report = *pert.obstruction;

  double gap = std::abs(demo.h_report.K - demo.h_tilde_report.K);
  for (int i = 0; i <= n; ++i) {
    gap = std::max(gap, std::abs(demo.h_report.u[i] - demo.h_tilde_report.u[i]));
    gap = std::max(gap, std::abs(demo.h_report.v[i] - demo.h_tilde_report.v[i]));
  }
  demo.shared_data_gap = gap;
  demo.lhs_difference = demo.h_tilde_report.lhs - demo.h_report.lhs;
  demo.predicted_difference = demo.v_kappa * factorial(2 * n - 2 * kappa) * factorial(2 * kappa) * demo.chi;

  std::ostringstream c;
  const bool a = demo.h_report.satisfied, b = demo.h_tilde_report.satisfied;
  if (a && b) {
    c << "both residuals are within tolerance, but their difference " << demo.lhs_difference
      << " is nonzero, so at most one condition holds exactly";
  } else if (a) {
    c << "h_n satisfies the compatibility condition; h~_n violates it";
  } else if (b) {
    c << "h~_n satisfies the compatibility condition; h_n violates it";
  } else {
    c << "neither h_n nor h~_n satisfies the compatibility condition";
  }
  demo.conclusion = c.str();
  return demo;
}

}  // namespace gjl
