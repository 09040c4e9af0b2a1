#include "gjl/pde_crosscheck.hpp"

#include "gjl/error.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace gjl {
namespace {

using std::numbers::pi;

// Unknowns live on the quarter grid x = i*hx, i = 0..nx/2 (likewise y); the
// even, 2 pi-periodic extension reflects at both x = 0 and x = pi.
class QuarterGrid {
 public:
  QuarterGrid(const GeodesicConfig& c)
      : nt(c.nt), nx(c.nx), ny(c.ny), mx(c.nx / 2), my(c.ny / 2),
        tau(1.0 / (c.nt - 1)), hx(2 * pi / c.nx), hy(2 * pi / c.ny) {}

  int reflect_x(int i) const { return reflect(i, nx); }
  int reflect_y(int j) const { return reflect(j, ny); }

  size_t slot(int k, int i, int j) const {
    return (static_cast<size_t>(k) * (mx + 1) + reflect_x(i)) * (my + 1) + reflect_y(j);
  }
  // Column of an interior unknown, or -1 for the fixed end slices.
  long unknown(int k, int i, int j) const {
    if (k <= 0 || k >= nt - 1) return -1;
    return static_cast<long>(((static_cast<size_t>(k) - 1) * (mx + 1) + reflect_x(i)) * (my + 1) + reflect_y(j));
  }
  size_t slice_size() const { return static_cast<size_t>(mx + 1) * (my + 1); }
  size_t unknown_count() const { return static_cast<size_t>(nt - 2) * slice_size(); }

  const int nt, nx, ny, mx, my;
  const double tau, hx, hy;

 private:
  static int reflect(int i, int n) {
    i %= n;
    if (i < 0) i += n;
    return i > n / 2 ? n - i : i;
  }
};

struct Evaluation {
  Eigen::VectorXd F;
  double max_abs = 0.0;
  double min_volume = 0.0;  // min of 1 + Lap Phi over all slices
};

double laplacian(const QuarterGrid& g, const std::vector<double>& phi, int k, int i, int j) {
  const double c = phi[g.slot(k, i, j)];
  return (phi[g.slot(k, i + 1, j)] - 2 * c + phi[g.slot(k, i - 1, j)]) / (g.hx * g.hx) +
         (phi[g.slot(k, i, j + 1)] - 2 * c + phi[g.slot(k, i, j - 1)]) / (g.hy * g.hy);
}

Evaluation evaluate(const QuarterGrid& g, const std::vector<double>& phi, double delta) {
  Evaluation ev;
  ev.F.resize(static_cast<long>(g.unknown_count()));
  ev.min_volume = INFINITY;
  for (int k = 0; k < g.nt; ++k)
    for (int i = 0; i <= g.mx; ++i)
      for (int j = 0; j <= g.my; ++j) ev.min_volume = std::min(ev.min_volume, 1.0 + laplacian(g, phi, k, i, j));
  const double tt = 1.0 / (g.tau * g.tau), cx = 1.0 / (4 * g.tau * g.hx), cy = 1.0 / (4 * g.tau * g.hy);
  for (int k = 1; k < g.nt - 1; ++k)
    for (int i = 0; i <= g.mx; ++i)
      for (int j = 0; j <= g.my; ++j) {
        auto P = [&](int dk, int di, int dj) { return phi[g.slot(k + dk, i + di, j + dj)]; };
        const double T = (P(1, 0, 0) - 2 * P(0, 0, 0) + P(-1, 0, 0)) * tt;
        const double L = laplacian(g, phi, k, i, j);
        const double Gx = (P(1, 1, 0) - P(1, -1, 0) - P(-1, 1, 0) + P(-1, -1, 0)) * cx;
        const double Gy = (P(1, 0, 1) - P(1, 0, -1) - P(-1, 0, 1) + P(-1, 0, -1)) * cy;
        const double f = T * (1 + L) - Gx * Gx - Gy * Gy - delta;
        ev.F[g.unknown(k, i, j)] = f;
        ev.max_abs = std::max(ev.max_abs, std::abs(f));
      }
  return ev;
}

Eigen::SparseMatrix<double> jacobian(const QuarterGrid& g, const std::vector<double>& phi) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(g.unknown_count() * 17);
  const double tt = 1.0 / (g.tau * g.tau), cx = 1.0 / (4 * g.tau * g.hx), cy = 1.0 / (4 * g.tau * g.hy);
  const double lx = 1.0 / (g.hx * g.hx), ly = 1.0 / (g.hy * g.hy);
  for (int k = 1; k < g.nt - 1; ++k)
    for (int i = 0; i <= g.mx; ++i)
      for (int j = 0; j <= g.my; ++j) {
        auto P = [&](int dk, int di, int dj) { return phi[g.slot(k + dk, i + di, j + dj)]; };
        const double T = (P(1, 0, 0) - 2 * P(0, 0, 0) + P(-1, 0, 0)) * tt;
        const double L = laplacian(g, phi, k, i, j);
        const double Gx = (P(1, 1, 0) - P(1, -1, 0) - P(-1, 1, 0) + P(-1, -1, 0)) * cx;
        const double Gy = (P(1, 0, 1) - P(1, 0, -1) - P(-1, 0, 1) + P(-1, 0, -1)) * cy;
        const long row = g.unknown(k, i, j);
        auto add = [&](int dk, int di, int dj, double v) {
          const long col = g.unknown(k + dk, i + di, j + dj);
          if (col >= 0 && v != 0.0) trips.emplace_back(row, col, v);
        };
        const double vol = 1 + L;
        add(1, 0, 0, tt * vol);
        add(-1, 0, 0, tt * vol);
        add(0, 0, 0, -2 * tt * vol - 2 * (lx + ly) * T);
        add(0, 1, 0, lx * T);
        add(0, -1, 0, lx * T);
        add(0, 0, 1, ly * T);
        add(0, 0, -1, ly * T);
        const double gx = -2 * Gx * cx, gy = -2 * Gy * cy;
        add(1, 1, 0, gx);
        add(1, -1, 0, -gx);
        add(-1, 1, 0, -gx);
        add(-1, -1, 0, gx);
        add(1, 0, 1, gy);
        add(1, 0, -1, -gy);
        add(-1, 0, 1, -gy);
        add(-1, 0, -1, gy);
      }
  const long n = static_cast<long>(g.unknown_count());
  Eigen::SparseMatrix<double> J(n, n);
  J.setFromTriplets(trips.begin(), trips.end());
  J.makeCompressed();
  return J;
}

using SparseLu = Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>;

void factorize(const Eigen::SparseMatrix<double>& J, SparseLu& lu, bool& factored, double delta) {
  if (!factored) lu.analyzePattern(J);
  lu.factorize(J);
  if (lu.info() != Eigen::Success) {
    fail(ErrorKind::Numeric, "singular Newton system at delta = " + std::to_string(delta));
  }
  factored = true;
}

// Solves J s = rhs by iterative refinement on a possibly stale LU of an
// earlier Jacobian; refactors when the refinement contracts too slowly.
Eigen::VectorXd newton_step(const Eigen::SparseMatrix<double>& J, const Eigen::VectorXd& rhs, SparseLu& lu,
                            bool& factored, double delta) {
  if (!factored) factorize(J, lu, factored, delta);
  const double target = 1e-13 * rhs.norm();
  Eigen::VectorXd s = lu.solve(rhs);
  double prev = INFINITY;
  for (int sweep = 0; sweep < 40; ++sweep) {
    const Eigen::VectorXd r = rhs - J * s;
    const double rn = r.norm();
    if (rn <= target) return s;
    if (rn > 0.3 * prev) break;
    prev = rn;
    s += lu.solve(r);
  }
  factorize(J, lu, factored, delta);
  s = lu.solve(rhs);
  for (int sweep = 0; sweep < 3; ++sweep) s += lu.solve(rhs - J * s);
  return s;
}

void validate_config(const GeodesicConfig& c) {
  if (c.nx < 16 || c.nx % 2 != 0 || c.ny < 16 || c.ny % 2 != 0) {
    fail(ErrorKind::InvalidArgument, "nx and ny must be even and >= 16");
  }
  if (c.nt < 9) fail(ErrorKind::InvalidArgument, "nt must be >= 9");
  if (c.delta_schedule.empty()) fail(ErrorKind::InvalidArgument, "delta schedule is empty");
  for (size_t s = 0; s < c.delta_schedule.size(); ++s) {
    const double d = c.delta_schedule[s];
    if (!(d > 0.0) || !std::isfinite(d)) fail(ErrorKind::InvalidArgument, "delta values must be positive");
    if (s > 0 && !(d < c.delta_schedule[s - 1])) {
      fail(ErrorKind::InvalidArgument, "delta schedule must be strictly decreasing");
    }
  }
  if (c.max_iterations < 1) fail(ErrorKind::InvalidArgument, "max_iterations must be >= 1");
}

// Fourth-order second difference; grouped so a constant row gives exactly 0.
double five_point(double m2, double m1, double c, double p1, double p2, double h) {
  return ((16 * (m1 + p1) - (m2 + p2)) - 30 * c) / (12 * h * h);
}

void center_jets(const QuarterGrid& g, const std::vector<double>& phi, std::vector<double>& a,
                 std::vector<double>& b) {
  a.resize(g.nt);
  b.resize(g.nt);
  for (int k = 0; k < g.nt; ++k) {
    auto P = [&](int i, int j) { return phi[g.slot(k, i, j)]; };
    a[k] = 0.5 * five_point(P(-2, 0), P(-1, 0), P(0, 0), P(1, 0), P(2, 0), g.hx);
    b[k] = 0.5 * five_point(P(0, -2), P(0, -1), P(0, 0), P(0, 1), P(0, 2), g.hy);
  }
}

struct Sigma2Stats {
  std::vector<double> t, sigma2;
  double mean = 0.0, spread = 0.0;
};

Sigma2Stats sigma2_stats(const std::vector<double>& a, const std::vector<double>& b) {
  Sigma2Stats s;
  const int nt = static_cast<int>(a.size());
  const double tau = 1.0 / (nt - 1);
  for (int k = 1; k < nt - 1; ++k) {
    const double da = (a[k + 1] - a[k - 1]) / (2 * tau);
    const double db = (b[k + 1] - b[k - 1]) / (2 * tau);
    const double z = 1 + 2 * a[k] + 2 * b[k];
    s.t.push_back(k * tau);
    s.sigma2.push_back(da * db / (z * z));
  }
  double lo = INFINITY, hi = -INFINITY, sum = 0.0;
  for (double v : s.sigma2) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    sum += v;
  }
  s.mean = sum / static_cast<double>(s.sigma2.size());
  s.spread = (hi == 0.0 && lo == 0.0) ? 0.0 : (hi - lo) / std::abs(s.mean);
  return s;
}

}  // namespace

GridSolution solve_geodesic(const TorusPotential& phi1, const GeodesicConfig& config) {
  validate_config(config);
  const QuarterGrid g(config);

  std::vector<double> phi(static_cast<size_t>(g.nt) * g.slice_size());
  for (int k = 0; k < g.nt; ++k) {
    const double t = k * g.tau;
    for (int i = 0; i <= g.mx; ++i)
      for (int j = 0; j <= g.my; ++j) phi[g.slot(k, i, j)] = t * phi1.value(i * g.hx, j * g.hy);
  }

  Evaluation ev = evaluate(g, phi, config.delta_schedule.front());
  if (!(ev.min_volume > 0.0)) {
    std::ostringstream msg;
    msg << "boundary potential is degenerate: min(1 + Lap phi) = " << ev.min_volume
        << "; reduce the amplitude or refine the grid";
    fail(ErrorKind::Numeric, msg.str());
  }

  GridSolution sol;
  sol.nt = g.nt;
  sol.nx = g.nx;
  sol.ny = g.ny;

  // One factorization is reused while it still preconditions well.
  SparseLu lu;
  bool factored = false;
  for (double delta : config.delta_schedule) {
    const double tol = 1e-9 * (1 + delta);
    ev = evaluate(g, phi, delta);
    int it = 0;
    while (ev.max_abs >= tol) {
      if (it == config.max_iterations) {
        std::ostringstream msg;
        msg << "Newton did not converge at delta = " << delta << " after " << it
            << " iterations (max residual " << ev.max_abs << "); increase delta or reduce the amplitude";
        fail(ErrorKind::Numeric, msg.str());
      }
      const Eigen::SparseMatrix<double> J = jacobian(g, phi);
      const Eigen::VectorXd step = newton_step(J, -ev.F, lu, factored, delta);

      double lambda = 1.0;
      for (;;) {
        std::vector<double> trial = phi;
        for (int k = 1; k < g.nt - 1; ++k)
          for (int i = 0; i <= g.mx; ++i)
            for (int j = 0; j <= g.my; ++j) trial[g.slot(k, i, j)] += lambda * step[g.unknown(k, i, j)];
        Evaluation tev = evaluate(g, trial, delta);
        if (tev.min_volume > 0.0 && tev.max_abs < ev.max_abs) {
          phi.swap(trial);
          ev = std::move(tev);
          break;
        }
        lambda *= 0.5;
        if (lambda < 1e-6) {
          std::ostringstream msg;
          msg << "Newton line search failed at delta = " << delta << " (max residual " << ev.max_abs
              << ", min(1 + Lap Phi) = " << tev.min_volume << "); the problem is close to degenerate";
          fail(ErrorKind::Numeric, msg.str());
        }
      }
      ++it;
    }
    StageRecord rec;
    rec.delta = delta;
    rec.iterations = it;
    rec.residual = ev.max_abs;
    center_jets(g, phi, rec.a, rec.b);
    sol.stages.push_back(std::move(rec));
    sol.delta = delta;
    sol.residual_norm = ev.max_abs;
  }

  sol.phi.resize(static_cast<size_t>(g.nt) * g.nx * g.ny);
  for (int k = 0; k < g.nt; ++k)
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) {
        sol.phi[(static_cast<size_t>(k) * g.nx + i) * g.ny + j] = phi[g.slot(k, i - g.nx / 2, j - g.ny / 2)];
      }
  return sol;
}

ExtractedJets extract_second_jets(const GridSolution& sol) {
  if (sol.nt < 2 || sol.nx < 5 || sol.ny < 5 || sol.phi.size() != static_cast<size_t>(sol.nt) * sol.nx * sol.ny) {
    fail(ErrorKind::InvalidArgument, "grid solution is empty or malformed");
  }
  const double hx = 2 * pi / sol.nx, hy = 2 * pi / sol.ny;
  const int ci = sol.nx / 2, cj = sol.ny / 2;
  ExtractedJets out;
  for (int k = 0; k < sol.nt; ++k) {
    auto P = [&](int di, int dj) { return sol.at(k, ci + di, cj + dj); };
    out.t.push_back(sol.t(k));
    out.a.push_back(0.5 * five_point(P(-2, 0), P(-1, 0), P(0, 0), P(1, 0), P(2, 0), hx));
    out.b.push_back(0.5 * five_point(P(0, -2), P(0, -1), P(0, 0), P(0, 1), P(0, 2), hy));
  }
  return out;
}

CrosscheckReport crosscheck_report(const GridSolution& sol, const SecondJetPath& reference) {
  const ExtractedJets jets = extract_second_jets(sol);
  CrosscheckReport rep;
  rep.t = jets.t;
  rep.a = jets.a;
  rep.b = jets.b;
  const Sigma2Stats s = sigma2_stats(jets.a, jets.b);
  rep.sigma2_t = s.t;
  rep.sigma2 = s.sigma2;
  rep.sigma2_mean = s.mean;
  rep.sigma2_spread = s.spread;
  rep.epsilon_pde = std::sqrt(std::max(0.0, -s.mean));
  rep.epsilon_reference = reference.causal_class == CausalClass::SpaceLike ? reference.epsilon : 0.0;
  const double diff = std::abs(rep.epsilon_pde - rep.epsilon_reference);
  rep.epsilon_deviation = rep.epsilon_reference > 0.0 ? diff / rep.epsilon_reference : diff;
  for (const StageRecord& st : sol.stages) rep.stage_spreads.push_back(sigma2_stats(st.a, st.b).spread);
  return rep;
}

void write_slices_csv(const GridSolution& sol, std::ostream& out) {
  out.precision(17);
  out << "# nt=" << sol.nt << " nx=" << sol.nx << " ny=" << sol.ny << " delta=" << sol.delta
      << " residual=" << sol.residual_norm << "\n";
  out << "k,t,i,j,x,y,phi\n";
  for (int k = 0; k < sol.nt; ++k)
    for (int i = 0; i < sol.nx; ++i)
      for (int j = 0; j < sol.ny; ++j) {
        out << k << ',' << sol.t(k) << ',' << i << ',' << j << ',' << (-pi + 2 * pi * i / sol.nx) << ','
            << (-pi + 2 * pi * j / sol.ny) << ',' << sol.at(k, i, j) << '\n';
      }
}

}  // namespace gjl
