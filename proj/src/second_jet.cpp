#include "gjl/second_jet.hpp"

#include "gjl/error.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

namespace gjl {
namespace {

using std::numbers::pi;

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Shooting on (a, b, a', b') with the slope sensitivities carried along, so
// the Newton Jacobian is exact up to the integrator error.

using State = std::array<double, 12>;  // a, b, p, q, then dS/d(p0,q0) row-major 4x2

State rhs(const State& y) {
  State dy{};
  const double z = 1.0 + 2.0 * y[0] + 2.0 * y[1];
  const double p = y[2], q = y[3];
  dy[0] = p;
  dy[1] = q;
  dy[2] = 4.0 * p * p / z;
  dy[3] = 4.0 * q * q / z;
  // Jacobian of the field
  const double jpa = -8.0 * p * p / (z * z), jpp = 8.0 * p / z;
  const double jqa = -8.0 * q * q / (z * z), jqq = 8.0 * q / z;
  for (int c = 0; c < 2; ++c) {
    const double sa = y[4 + c], sb = y[6 + c], sp = y[8 + c], sq = y[10 + c];
    dy[4 + c] = sp;
    dy[6 + c] = sq;
    dy[8 + c] = jpa * (sa + sb) + jpp * sp;
    dy[10 + c] = jqa * (sa + sb) + jqq * sq;
  }
  return dy;
}

bool rk4_step(State& y, double h) {
  auto add = [](const State& a, const State& b, double s) {
    State r;
    for (size_t i = 0; i < r.size(); ++i) r[i] = a[i] + s * b[i];
    return r;
  };
  const State k1 = rhs(y);
  const State k2 = rhs(add(y, k1, h / 2));
  const State k3 = rhs(add(y, k2, h / 2));
  const State k4 = rhs(add(y, k3, h));
  for (size_t i = 0; i < y.size(); ++i) y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  const double z = 1.0 + 2.0 * y[0] + 2.0 * y[1];
  return std::isfinite(z) && z > 0.0;
}

struct ShotResult {
  bool ok = false;
  Eigen::MatrixXd samples;  // node_count x 2 (a, b)
  State end{};
};

constexpr double kShootingStep = 2e-4;

ShotResult shoot(const SecondJetBoundary& bd, double p0, double q0, const TimeGrid& grid) {
  ShotResult out;
  out.samples.resize(grid.node_count(), 2);
  State y{};
  y[0] = bd.a0;
  y[1] = bd.b0;
  y[2] = p0;
  y[3] = q0;
  y[8] = 1.0;   // dp/dp0
  y[11] = 1.0;  // dq/dq0
  out.samples(0, 0) = y[0];
  out.samples(0, 1) = y[1];
  for (int i = 1; i < grid.node_count(); ++i) {
    const double span = grid.node(i) - grid.node(i - 1);
    const int steps = std::max(1, static_cast<int>(std::ceil(span / kShootingStep)));
    const double h = span / steps;
    for (int s = 0; s < steps; ++s) {
      if (!rk4_step(y, h)) return out;
    }
    out.samples(i, 0) = y[0];
    out.samples(i, 1) = y[1];
  }
  out.ok = true;
  out.end = y;
  return out;
}

double sq(double v) { return v * v; }

// Initial slopes of the time-like arc through the two endpoints, taken from
// the hyperbola Z^2 - (X - lambda)^2 = 1 - lambda^2 in coordinates where
// p0 = (0, 1) and X1 > 0. Used as the starting point of the Newton shooting.
std::pair<double, double> timelike_initial_slopes(const HalfPlanePoint& p0, const HalfPlanePoint& p1) {
  const double dx = p1.X - p0.X;
  const double sgn = dx < 0 ? -1.0 : 1.0;
  const double xn = std::abs(dx) / p0.Z;
  const double zn = p1.Z / p0.Z;
  double zp, xp;  // normalized derivatives at t = 0
  if (xn < 1e-12) {
    zp = std::log(zn);
    xp = 0.0;
  } else {
    const double lambda = (1.0 + xn * xn - zn * zn) / (2.0 * xn);
    const double k = std::sqrt(std::max(lambda * lambda - 1.0, 0.0));
    const double u0 = std::asinh(k);
    const double u1 = std::asinh(k / zn);
    const double mu = u1 - u0;
    const double branch = lambda > 0 ? 1.0 : -1.0;  // sign of (lambda - X) along the arc
    zp = -mu * std::sqrt(1.0 + k * k) / k;
    xp = branch * mu / k;
  }
  const double Zp = p0.Z * zp;
  const double Xp = sgn * p0.Z * xp;
  return {(Zp + Xp) / 4.0, (Zp - Xp) / 4.0};
}

SecondJetPath shoot_bvp(const SecondJetBoundary& bd, const HalfPlanePoint& p0, const HalfPlanePoint& p1,
                        const GridPtr& grid) {
  auto [p, q] = timelike_initial_slopes(p0, p1);
  if (!std::isfinite(p) || !std::isfinite(q)) {
    p = bd.a1 - bd.a0;
    q = bd.b1 - bd.b0;
  }
  ShotResult shot = shoot(bd, p, q, *grid);
  double mismatch = std::numeric_limits<double>::infinity();
  auto mismatch_of = [&](const ShotResult& s) {
    return std::hypot(s.end[0] - bd.a1, s.end[1] - bd.b1);
  };
  if (shot.ok) mismatch = mismatch_of(shot);
  constexpr int kMaxIter = 60;
  const double scale = 1.0 + std::abs(bd.a1) + std::abs(bd.b1);
  for (int it = 0; it < kMaxIter && shot.ok && mismatch > 1e-14 * scale; ++it) {
    const State& e = shot.end;
    Eigen::Matrix2d jac;
    jac << e[4], e[5], e[6], e[7];
    Eigen::Vector2d r(e[0] - bd.a1, e[1] - bd.b1);
    Eigen::Vector2d step = jac.fullPivLu().solve(r);
    double damp = 1.0;
    bool improved = false;
    for (int h = 0; h < 30; ++h, damp *= 0.5) {
      ShotResult trial = shoot(bd, p - damp * step[0], q - damp * step[1], *grid);
      if (trial.ok && mismatch_of(trial) < mismatch) {
        p -= damp * step[0];
        q -= damp * step[1];
        shot = std::move(trial);
        mismatch = mismatch_of(shot);
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (!shot.ok || mismatch > 1e-10 * scale) {
    fail(ErrorKind::Numeric, "shooting did not converge: endpoint residual " + fmt_double(mismatch));
  }

  SecondJetPath path;
  path.boundary = bd;
  path.causal_class = CausalClass::TimeLike;
  Eigen::VectorXd av = shot.samples.col(0), bv = shot.samples.col(1);
  av[0] = bd.a0;
  bv[0] = bd.b0;
  av[av.size() - 1] = bd.a1;
  bv[bv.size() - 1] = bd.b1;
  path.a = CoefficientSeries(grid, av);
  path.b = CoefficientSeries(grid, bv);
  const double dx = p1.X - p0.X;
  if (std::abs(dx) > 1e-12 * p0.Z) {
    const double xn = std::abs(dx) / p0.Z, zn = p1.Z / p0.Z;
    const double lambda_n = (1.0 + xn * xn - zn * zn) / (2.0 * xn);
    const double sgn = dx < 0 ? -1.0 : 1.0;
    path.hyperbola = Hyperbola{p0.X + sgn * p0.Z * lambda_n, sq(p0.Z) * (1.0 - lambda_n * lambda_n)};
  }
  return path;
}

SecondJetPath vertical_line(const SecondJetBoundary& bd, const HalfPlanePoint& p0, const HalfPlanePoint& p1,
                            const GridPtr& grid) {
  // X constant, log Z linear in t.
  const double ratio = std::log(p1.Z / p0.Z);
  SecondJetPath path;
  path.boundary = bd;
  path.causal_class = CausalClass::TimeLike;
  // a - a0 = b - b0 = (Z - Z0) / 4
  auto dz = CoefficientSeries::sample(grid, [&](double t) { return p0.Z * std::expm1(ratio * t) / 4.0; });
  path.a = CoefficientSeries::constant(grid, bd.a0) + dz;
  path.b = CoefficientSeries::constant(grid, bd.b0) + dz;
  return path;
}

SecondJetPath lightlike(const SecondJetBoundary& bd, const HalfPlanePoint& p0, const HalfPlanePoint& p1,
                        const GridPtr& grid) {
  // One of a, b is constant and 1/Z is linear in t.
  const bool b_constant = std::abs(bd.b1 - bd.b0) <= std::abs(bd.a1 - bd.a0);
  auto z = CoefficientSeries::sample(grid, [&](double t) { return 1.0 / ((1.0 - t) / p0.Z + t / p1.Z); });
  SecondJetPath path;
  path.boundary = bd;
  path.causal_class = CausalClass::LightLike;
  if (b_constant) {
    path.b = CoefficientSeries::constant(grid, bd.b0);
    path.a = CoefficientSeries::sample(grid, [&](double t) {
      const double zt = 1.0 / ((1.0 - t) / p0.Z + t / p1.Z);
      return bd.a0 + (zt - p0.Z) / 2.0;
    });
  } else {
    path.a = CoefficientSeries::constant(grid, bd.a0);
    path.b = CoefficientSeries::sample(grid, [&](double t) {
      const double zt = 1.0 / ((1.0 - t) / p0.Z + t / p1.Z);
      return bd.b0 + (zt - p0.Z) / 2.0;
    });
  }
  path.hyperbola = Hyperbola{p0.X + (b_constant ? -1.0 : 1.0) * p0.Z, 0.0};
  return path;
}

SecondJetPath spacelike(const SecondJetBoundary& bd, const HalfPlanePoint& p0, const HalfPlanePoint& p1,
                        const GridPtr& grid) {
  const double d = distance(p0, p1);
  const double eps = d / 4.0;
  const double dx = p1.X - p0.X;
  // Reflection X -> -X is the axis swap a <-> b.
  const bool swapped = dx < 0;
  const double sgn = swapped ? -1.0 : 1.0;
  const double r = p0.Z / p1.Z;
  // 2 theta0 in (0, pi) with tan(2 theta0) = sin D / (r - cos D).
  const double two_theta0 = std::atan2(std::sin(d), r - std::cos(d));
  const double theta0 = two_theta0 / 2.0;
  const double z0 = p0.Z;

  // Normalized arc (p0 -> (0, 1)): Zn = sin(2 theta0) / sin(2 theta0 + 4 eps t),
  // Xn = sin(4 eps t) / sin(2 theta0 + 4 eps t).
  auto zn_minus_one = [&](double t) {
    return -2.0 * std::cos(two_theta0 + 2.0 * eps * t) * std::sin(2.0 * eps * t) /
           std::sin(two_theta0 + 4.0 * eps * t);
  };
  auto xn = [&](double t) { return std::sin(4.0 * eps * t) / std::sin(two_theta0 + 4.0 * eps * t); };

  SecondJetPath path;
  path.boundary = bd;
  path.causal_class = CausalClass::SpaceLike;
  path.epsilon = eps;
  path.swapped_axes = swapped;
  path.a = CoefficientSeries::sample(grid, [&](double t) {
    return bd.a0 + z0 * (zn_minus_one(t) + sgn * xn(t)) / 4.0;
  });
  path.b = CoefficientSeries::sample(grid, [&](double t) {
    return bd.b0 + z0 * (zn_minus_one(t) - sgn * xn(t)) / 4.0;
  });
  path.A = CoefficientSeries::sample(grid, [&](double t) { return std::tan(theta0 + 2.0 * eps * t); });
  path.sigma1 = CoefficientSeries::sample(grid, [&](double t) {
    return -2.0 * eps / std::tan(two_theta0 + 4.0 * eps * t);
  });
  path.sigma2 = -eps * eps;
  const double c = std::sin(two_theta0);
  path.hyperbola = Hyperbola{p0.X + sgn * z0 * std::cos(two_theta0), sq(z0 * c)};
  return path;
}

void require_interior_positive(const SecondJetPath& path) {
  const CoefficientSeries z = path.volume();
  for (int i = 0; i < z.size(); ++i) {
    if (!(z[i] > 0.0)) {
      fail(ErrorKind::Numeric, "path leaves the region a + b + 1/2 > 0 at t = " + fmt_double(z.grid().node(i)));
    }
  }
}

}  // namespace

const char* to_string(CausalClass c) noexcept {
  switch (c) {
    case CausalClass::SpaceLike: return "space-like";
    case CausalClass::TimeLike: return "time-like";
    case CausalClass::LightLike: return "light-like";
    case CausalClass::Stationary: return "stationary";
  }
  return "unknown";
}

CoefficientSeries SecondJetPath::volume() const {
  return CoefficientSeries::constant(a.grid_ptr(), 1.0) + 2.0 * a + 2.0 * b;
}

void validate(const SecondJetBoundary& bd) {
  for (double v : {bd.a0, bd.b0, bd.a1, bd.b1}) {
    if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "boundary coefficients must be finite");
  }
  if (!(bd.a0 + bd.b0 + 0.5 > 0.0)) {
    fail(ErrorKind::InvalidArgument, "boundary violates a0 + b0 + 1/2 > 0 (got " + fmt_double(bd.a0 + bd.b0 + 0.5) + ")");
  }
  if (!(bd.a1 + bd.b1 + 0.5 > 0.0)) {
    fail(ErrorKind::InvalidArgument, "boundary violates a1 + b1 + 1/2 > 0 (got " + fmt_double(bd.a1 + bd.b1 + 0.5) + ")");
  }
}

std::pair<HalfPlanePoint, HalfPlanePoint> to_halfplane(const SecondJetBoundary& bd) {
  return {HalfPlanePoint{2.0 * bd.a0 - 2.0 * bd.b0, 1.0 + 2.0 * bd.a0 + 2.0 * bd.b0},
          HalfPlanePoint{2.0 * bd.a1 - 2.0 * bd.b1, 1.0 + 2.0 * bd.a1 + 2.0 * bd.b1}};
}

bool connectable(const HalfPlanePoint& p0, const HalfPlanePoint& p1) {
  return p1.Z + p0.Z > std::abs(p1.X - p0.X);
}

CausalClass classify(const HalfPlanePoint& p0, const HalfPlanePoint& p1) {
  if (!connectable(p0, p1)) {
    fail(ErrorKind::Domain, "half-plane points are not connectable: Z0 + Z1 <= |X1 - X0|");
  }
  const double dz = std::abs(p1.Z - p0.Z);
  const double dx = std::abs(p1.X - p0.X);
  if (dz <= kClassifyTolerance && dx <= kClassifyTolerance) return CausalClass::Stationary;
  if (std::abs(dz - dx) <= kClassifyTolerance) return CausalClass::LightLike;
  return dz < dx ? CausalClass::SpaceLike : CausalClass::TimeLike;
}

double distance(const HalfPlanePoint& p0, const HalfPlanePoint& p1) {
  if (classify(p0, p1) != CausalClass::SpaceLike) {
    fail(ErrorKind::Domain, "distance is defined for space-like pairs only");
  }
  const double dx = p1.X - p0.X, dz = p1.Z - p0.Z;
  const double cos_d = (sq(p0.Z) + sq(p1.Z) - sq(dx)) / (2.0 * p0.Z * p1.Z);
  if (!(cos_d > -1.0 - 1e-12 && cos_d < 1.0 + 1e-12)) {
    fail(ErrorKind::Internal, "cos D = " + fmt_double(cos_d) + " outside (-1, 1) for a space-like pair");
  }
  // Half-angle form of the same relation:
  // 1 - cos D = (dx^2 - dz^2) / (2 Z0 Z1), 1 + cos D = ((Z0 + Z1)^2 - dx^2) / (2 Z0 Z1).
  const double one_minus = (std::abs(dx) - std::abs(dz)) * (std::abs(dx) + std::abs(dz));
  const double one_plus = (p0.Z + p1.Z - std::abs(dx)) * (p0.Z + p1.Z + std::abs(dx));
  return 2.0 * std::atan2(std::sqrt(one_minus), std::sqrt(one_plus));
}

double epsilon_from_boundary(const SecondJetBoundary& bd) {
  validate(bd);
  auto [p0, p1] = to_halfplane(bd);
  const CausalClass c = classify(p0, p1);
  if (c != CausalClass::SpaceLike) {
    fail(ErrorKind::Domain, std::string("epsilon needs space-like 2-jets, got ") + to_string(c));
  }
  return distance(p0, p1) / 4.0;
}

SecondJetPath solve_bvp(const SecondJetBoundary& bd, const GridPtr& grid) {
  validate(bd);
  auto [p0, p1] = to_halfplane(bd);
  if (!connectable(p0, p1)) {
    std::string which;
    if (!(bd.a0 + bd.b1 + 0.5 > 0.0)) which = "a0 + b1 + 1/2 > 0";
    if (!(bd.a1 + bd.b0 + 0.5 > 0.0)) which += (which.empty() ? "" : " and ") + std::string("a1 + b0 + 1/2 > 0");
    if (which.empty()) which = "Z0 + Z1 > |X1 - X0|";
    fail(ErrorKind::Domain, "boundary 2-jets cannot be connected: violates " + which);
  }
  SecondJetPath path;
  switch (classify(p0, p1)) {
    case CausalClass::Stationary:
      path.boundary = bd;
      path.causal_class = CausalClass::Stationary;
      path.a = CoefficientSeries::constant(grid, bd.a0);
      path.b = CoefficientSeries::constant(grid, bd.b0);
      path.sigma1 = CoefficientSeries::constant(grid, 0.0);
      return path;
    case CausalClass::SpaceLike:
      path = spacelike(bd, p0, p1, grid);
      break;
    case CausalClass::LightLike:
      path = lightlike(bd, p0, p1, grid);
      path.sigma1 = sigma1_series(path.a, path.b);
      path.sigma2 = 0.0;
      break;
    case CausalClass::TimeLike:
      path = std::abs(p1.X - p0.X) <= kClassifyTolerance ? vertical_line(bd, p0, p1, grid)
                                                         : shoot_bvp(bd, p0, p1, grid);
      path.sigma1 = sigma1_series(path.a, path.b);
      path.sigma2 = sigma2_series(path.a, path.b).values().mean();
      break;
  }
  require_interior_positive(path);
  return path;
}

double ode_residual(const CoefficientSeries& a, const CoefficientSeries& b) {
  require_same_grid(a, b);
  const auto da = derivative(a), db = derivative(b);
  const auto dda = derivative(da), ddb = derivative(db);
  double worst = 0.0;
  for (int i = 0; i < a.size(); ++i) {
    const double z = 1.0 + 2.0 * a[i] + 2.0 * b[i];
    const double r = std::abs(dda[i] - 4.0 * da[i] * da[i] / z) + std::abs(ddb[i] - 4.0 * db[i] * db[i] / z);
    worst = std::max(worst, r);
  }
  return worst;
}

double ode_residual(const SecondJetPath& path) { return ode_residual(path.a, path.b); }

CoefficientSeries sigma2_series(const CoefficientSeries& a, const CoefficientSeries& b) {
  require_same_grid(a, b);
  const auto da = derivative(a), db = derivative(b);
  Eigen::VectorXd v(a.size());
  for (int i = 0; i < a.size(); ++i) v[i] = da[i] * db[i] / sq(1.0 + 2.0 * a[i] + 2.0 * b[i]);
  return CoefficientSeries(a.grid_ptr(), std::move(v));
}

CoefficientSeries sigma1_series(const CoefficientSeries& a, const CoefficientSeries& b) {
  require_same_grid(a, b);
  const auto da = derivative(a), db = derivative(b);
  Eigen::VectorXd v(a.size());
  for (int i = 0; i < a.size(); ++i) v[i] = (da[i] + db[i]) / (1.0 + 2.0 * a[i] + 2.0 * b[i]);
  return CoefficientSeries(a.grid_ptr(), std::move(v));
}

}  // namespace gjl
