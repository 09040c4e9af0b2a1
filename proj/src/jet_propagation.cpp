#include "gjl/jet_propagation.hpp"

#include "gjl/error.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace gjl {
namespace {

using std::numbers::pi;
using Series = std::vector<CoefficientSeries>;

void require_even_degree(int order, int minimum, const char* what) {
  if (order < minimum || order % 2 != 0) {
    fail(ErrorKind::InvalidArgument,
         std::string(what) + " must be an even degree >= " + std::to_string(minimum) + ", got " + std::to_string(order));
  }
}

// Even-even coefficient vector (descending x-exponent) -> Homogeneous.
Homogeneous to_homogeneous(const Eigen::VectorXd& ee, int degree) {
  Homogeneous h = Homogeneous::zero(degree);
  for (int i = 0; i < ee.size(); ++i) h.c[degree - 2 * i] = ee[i];
  return h;
}

Eigen::VectorXd even_part(const Homogeneous& h) {
  const int m = h.degree / 2;
  Eigen::VectorXd out(m + 1);
  for (int i = 0; i <= m; ++i) out[i] = h.c[h.degree - 2 * i];
  return out;
}

Eigen::VectorXd at_node(const Series& s, int node) {
  Eigen::VectorXd v(s.size());
  for (size_t k = 0; k < s.size(); ++k) v[k] = s[k][node];
  return v;
}

Series differentiate(const Series& s) {
  Series out;
  out.reserve(s.size());
  for (const auto& c : s) out.push_back(derivative(c));
  return out;
}

// x <-> y on an even-even coefficient vector.
Eigen::VectorXd swap_axes(const Eigen::VectorXd& v) { return v.reverse(); }

Series swap_axes(const Series& s) { return Series(s.rbegin(), s.rend()); }

struct NodeJets {
  int degree;
  Series p, dp, ddp;
};

std::vector<NodeJets> lower_jets(const JetHierarchy& lower, int target_order) {
  if (!lower.grid) fail(ErrorKind::InvalidState, "jet hierarchy has no time grid");
  std::vector<NodeJets> out;
  for (int d = 2; d <= target_order - 2; d += 2) {
    if (d > 2 && !lower.orders.count(d)) {
      fail(ErrorKind::InvalidState, "degree " + std::to_string(d) + " jets are missing below degree " +
                                        std::to_string(target_order));
    }
    Series p = lower.at(d);
    Series dp = differentiate(p);
    Series ddp = differentiate(dp);
    out.push_back({d, std::move(p), std::move(dp), std::move(ddp)});
  }
  return out;
}

void validate_jets(const JetData& jets, const char* name) {
  for (const auto& [degree, coeffs] : jets) {
    const std::string where = std::string(name) + " degree " + std::to_string(degree);
    if (degree < 0) fail(ErrorKind::InvalidArgument, where + ": negative degree");
    for (int i = 0; i < coeffs.size(); ++i) {
      if (!std::isfinite(coeffs[i])) fail(ErrorKind::InvalidArgument, where + ": non-finite coefficient");
    }
    if (degree % 2 != 0) {
      if (coeffs.cwiseAbs().maxCoeff() != 0.0) {
        fail(ErrorKind::InvalidArgument, where + ": odd-order jets of an even potential must vanish");
      }
      continue;
    }
    if (coeffs.size() == degree + 1) {
      for (int i = 1; i < coeffs.size(); i += 2) {
        if (coeffs[i] != 0.0) {
          fail(ErrorKind::InvalidArgument, where + ": monomials odd in x or y must have zero coefficient");
        }
      }
    } else if (coeffs.size() != degree / 2 + 1) {
      fail(ErrorKind::InvalidArgument, where + ": expected " + std::to_string(degree / 2 + 1) + " or " +
                                           std::to_string(degree + 1) + " coefficients, got " +
                                           std::to_string(coeffs.size()));
    }
  }
}

double top_mode_frequency(double epsilon, int order) { return 4.0 * epsilon * (order / 2); }

}  // namespace

int JetHierarchy::max_order() const { return orders.empty() ? 2 : orders.rbegin()->first; }

std::vector<CoefficientSeries> JetHierarchy::at(int order) const {
  if (order == 2) return {path2.a, path2.b};
  auto it = orders.find(order);
  if (it == orders.end()) fail(ErrorKind::InvalidState, "no jets stored for degree " + std::to_string(order));
  return it->second;
}

Eigen::VectorXd even_jet(const JetData& jets, int order) {
  auto it = jets.find(order);
  if (it == jets.end()) return Eigen::VectorXd::Zero(order / 2 + 1);
  const Eigen::VectorXd& c = it->second;
  if (c.size() == order / 2 + 1) return c;
  if (c.size() != order + 1) fail(ErrorKind::InvalidArgument, "malformed jet vector at degree " + std::to_string(order));
  Eigen::VectorXd out(order / 2 + 1);
  for (int i = 0; i <= order / 2; ++i) out[i] = c[2 * i];
  return out;
}

// ---------------------------------------------------------------------------

ModeSolution solve_mode(const ModeProblem& problem) {
  if (!(problem.lambda >= 0.0)) fail(ErrorKind::InvalidArgument, "mode eigenvalue must be nonnegative");
  const CoefficientSeries& k = problem.source;
  const GridPtr& grid = k.grid_ptr();
  const double omega = std::sqrt(problem.lambda);

  ModeSolution sol;
  const int m = static_cast<int>(std::lround(omega / pi));
  const double gap = std::abs(omega - m * pi);
  if (m >= 1 && gap <= kResonanceTolerance) {
    sol.resonant = true;
    sol.multiple = m;
  } else if (m >= 1 && gap <= kNearResonanceTolerance) {
    sol.near_resonant = true;
  }

  const CoefficientSeries c = CoefficientSeries::sample(grid, [omega](double t) { return std::cos(omega * t); });
  const CoefficientSeries s = CoefficientSeries::sample(
      grid, [omega](double t) { return omega > 0.0 ? std::sin(omega * t) / omega : t; });
  // Solution of the initial-value problem with zero data.
  const CoefficientSeries particular = s * cumulative_integral(c * k) - c * cumulative_integral(s * k);
  CoefficientSeries base = particular + problem.f0 * c;

  if (!sol.resonant) {
    const double beta = (problem.f1 - base.back()) / s.back();
    sol.f = base + beta * s;
    return sol;
  }

  const double mpi = m * pi;
  const CoefficientSeries sin_m = CoefficientSeries::sample(grid, [mpi](double t) { return std::sin(mpi * t); });
  const double sign = m % 2 == 0 ? 1.0 : -1.0;
  sol.compatibility_defect = problem.f0 - sign * problem.f1 - integrate(k * sin_m) / mpi;
  sol.compatible = std::abs(sol.compatibility_defect) <= kCompatibilityTolerance;
  const double beta = -integrate(base * sin_m) / integrate(s * sin_m);
  sol.f = base + beta * s;
  return sol;
}

double mode_residual(const ModeProblem& problem, const CoefficientSeries& f) {
  const CoefficientSeries r = derivative(derivative(f)) + problem.lambda * f - problem.source;
  return r.max_abs();
}

// ---------------------------------------------------------------------------

std::vector<CoefficientSeries> bilinear_source(const JetHierarchy& lower, int target_order) {
  require_even_degree(target_order, 4, "source degree");
  const std::vector<NodeJets> jets = lower_jets(lower, target_order);
  const GridPtr& grid = lower.grid;
  const int nodes = grid->node_count();
  const int dim = target_order / 2 + 1;

  Eigen::MatrixXd values = Eigen::MatrixXd::Zero(dim, nodes);
  for (int i = 0; i < nodes; ++i) {
    Homogeneous sum = Homogeneous::zero(target_order);
    for (const NodeJets& u : jets) {
      for (const NodeJets& w : jets) {
        if (u.degree + w.degree - 2 != target_order) continue;
        // -(Lap L_u) L_w''
        Homogeneous lap = to_homogeneous(at_node(u.p, i), u.degree).laplacian();
        Homogeneous term = lap * to_homogeneous(at_node(w.ddp, i), w.degree);
        term *= -1.0;
        sum += term;
        // grad L_u' . grad L_w'
        const Homogeneous pu = to_homogeneous(at_node(u.dp, i), u.degree);
        const Homogeneous pw = to_homogeneous(at_node(w.dp, i), w.degree);
        sum += pu.dx() * pw.dx();
        sum += pu.dy() * pw.dy();
      }
    }
    values.col(i) = even_part(sum);
  }
  Series out;
  out.reserve(dim);
  for (int r = 0; r < dim; ++r) out.emplace_back(grid, values.row(r).transpose());
  return out;
}

std::vector<CoefficientSeries> source_K1(const JetHierarchy& lower, int target_order) {
  Series raw = bilinear_source(lower, target_order);
  const CoefficientSeries z = lower.path2.volume();
  for (auto& s : raw) s = s / z;
  return raw;
}

// ---------------------------------------------------------------------------

ObstructionReport compatibility_check(const JetData& phi0, const JetData& phi1, const JetHierarchy& lower,
                                      int order) {
  require_even_degree(order, 4, "resonant degree");
  validate_jets(phi0, "phi0");
  validate_jets(phi1, "phi1");
  const SecondJetPath& path = lower.path2;
  if (path.causal_class != CausalClass::SpaceLike || !path.A) {
    fail(ErrorKind::InvalidState, "compatibility data needs a space-like 2-jet path");
  }
  const int n = order / 2;
  const double omega = top_mode_frequency(path.epsilon, order);
  const int m = static_cast<int>(std::lround(omega / pi));
  if (m < 1 || std::abs(omega - m * pi) > kResonanceTolerance) {
    std::ostringstream msg;
    msg << "degree " << order << " is not resonant: 4*eps*" << n << " = " << omega;
    fail(ErrorKind::InvalidState, msg.str());
  }

  const Series source = source_K1(lower, order);
  const CoefficientSeries& A = *path.A;
  const GridPtr& grid = lower.grid;
  const PolyBasis ee = PolyBasis::even(n);
  Eigen::VectorXd top(grid->node_count());
  for (int i = 0; i < grid->node_count(); ++i) {
    Eigen::VectorXd s = at_node(source, i);
    if (path.swapped_axes) s = swap_axes(s);
    top[i] = apply_d_operator(n, A[i], PolyVector{ee, s});
  }
  const double mpi = m * pi;
  const CoefficientSeries sin_m = CoefficientSeries::sample(grid, [mpi](double t) { return std::sin(mpi * t); });

  ObstructionReport rep;
  rep.resonant_order = order;
  rep.multiple = m;
  rep.K = integrate(CoefficientSeries(grid, top) * sin_m) / mpi;

  const std::vector<double> w0 = d_operator_weights(n, A.front());
  const std::vector<double> w1 = d_operator_weights(n, A.back());
  const double sign = m % 2 == 0 ? 1.0 : -1.0;
  const Eigen::VectorXd p0 = even_jet(phi0, order);
  const Eigen::VectorXd p1 = even_jet(phi1, order);
  rep.u.resize(n + 1);
  rep.v.resize(n + 1);
  rep.lhs = 0.0;
  for (int i = 0; i <= n; ++i) {
    // Caller index i is D_x^(2n-2i) D_y^(2i); the frame weight index counts x-exponent / 2.
    const int j = path.swapped_axes ? i : n - i;
    rep.v[i] = w0[j];
    rep.u[i] = -sign * w1[j];
    const double f = factorial(2 * n - 2 * i) * factorial(2 * i);
    rep.lhs += rep.v[i] * f * p0[i] + rep.u[i] * f * p1[i];
  }
  rep.residual = std::abs(rep.lhs - rep.K);
  rep.satisfied = rep.residual <= kCompatibilityTolerance;
  return rep;
}

// ---------------------------------------------------------------------------

PropagationResult propagate(const JetData& phi0, const JetData& phi1, int max_order, const GridPtr& grid) {
  if (!grid) fail(ErrorKind::InvalidArgument, "propagation needs a time grid");
  require_even_degree(max_order, 2, "max_order");
  validate_jets(phi0, "phi0");
  validate_jets(phi1, "phi1");

  const Eigen::VectorXd j0 = even_jet(phi0, 2), j1 = even_jet(phi1, 2);
  const SecondJetBoundary boundary{j0[0], j0[1], j1[0], j1[1]};
  validate(boundary);
  const auto [h0, h1] = to_halfplane(boundary);
  const CausalClass cls = classify(h0, h1);
  if (cls != CausalClass::SpaceLike && cls != CausalClass::Stationary) {
    fail(ErrorKind::Domain, std::string("higher jets are only propagated for space-like or stationary 2-jets; these are ") +
                                to_string(cls));
  }

  PropagationResult result;
  result.hierarchy.grid = grid;
  result.hierarchy.path2 = solve_bvp(boundary, grid);
  const SecondJetPath& path = result.hierarchy.path2;
  if (cls == CausalClass::Stationary) {
    // Constant 2-jets: every monomial obeys Z P'' = K1 on its own, never resonant.
    for (int order = 4; order <= max_order; order += 2) {
      const Series source = source_K1(result.hierarchy, order);
      const Eigen::VectorXd p0 = even_jet(phi0, order), p1 = even_jet(phi1, order);
      Series stored;
      for (int r = 0; r <= order / 2; ++r) {
        CoefficientSeries f = solve_mode({0.0, source[r], p0[r], p1[r]}).f;
        Eigen::VectorXd v = f.values();
        v[0] = p0[r];
        v[v.size() - 1] = p1[r];
        stored.emplace_back(grid, v);
      }
      result.hierarchy.orders.emplace(order, std::move(stored));
    }
    return result;
  }
  const CoefficientSeries& A = *path.A;
  const double eps = path.epsilon;
  const int nodes = grid->node_count();

  for (int order = 4; order <= max_order; order += 2) {
    const int n = order / 2;
    const double omega_top = top_mode_frequency(eps, order);
    if (!result.beyond_proven_range && omega_top > pi + kResonanceTolerance) {
      result.beyond_proven_range = true;
      std::ostringstream msg;
      msg << "degree " << order << " has 4*eps*" << n << " = " << omega_top
          << " > pi without an earlier resonance; solved as a non-resonant problem outside the proven range";
      result.warnings.push_back(msg.str());
    }

    Series source = source_K1(result.hierarchy, order);
    Eigen::VectorXd p0 = even_jet(phi0, order), p1 = even_jet(phi1, order);
    if (path.swapped_axes) {
      source = swap_axes(source);
      p0 = swap_axes(p0);
      p1 = swap_axes(p1);
    }

    const QBasis qb(n);
    const PolyBasis& ee = qb.basis();
    Eigen::MatrixXd k_modes(n + 1, nodes);
    std::vector<Eigen::VectorXd> u_at(nodes);
    for (int i = 0; i < nodes; ++i) {
      u_at[i] = u_eigenvalues(ee, A[i]);
      k_modes.col(i) = qb.coordinates(at_node(source, i).cwiseQuotient(u_at[i]));
    }
    const Eigen::VectorXd f0 = qb.coordinates(p0.cwiseQuotient(u_at.front()));
    const Eigen::VectorXd f1 = qb.coordinates(p1.cwiseQuotient(u_at.back()));

    Eigen::MatrixXd f_modes(n + 1, nodes);
    bool resonant = false;
    for (int k = 0; k <= n; ++k) {
      const ModeProblem problem{16.0 * eps * eps * k * k, CoefficientSeries(grid, k_modes.row(k).transpose()), f0[k],
                                f1[k]};
      const ModeSolution sol = solve_mode(problem);
      if (sol.near_resonant) {
        std::ostringstream msg;
        msg << "degree " << order << " mode " << k << " is within " << kNearResonanceTolerance
            << " of resonance; the boundary-value solve is ill-conditioned";
        result.warnings.push_back(msg.str());
      }
      resonant = resonant || sol.resonant;
      f_modes.row(k) = sol.f.values().transpose();
    }
    if (resonant) {
      result.obstruction = compatibility_check(phi0, phi1, result.hierarchy, order);
      break;
    }

    Eigen::MatrixXd p(n + 1, nodes);
    for (int i = 0; i < nodes; ++i) p.col(i) = u_at[i].cwiseProduct(qb.combine(f_modes.col(i)));
    p.col(0) = p0;
    p.col(nodes - 1) = p1;
    if (path.swapped_axes) p = p.colwise().reverse().eval();
    Series stored;
    stored.reserve(n + 1);
    for (int r = 0; r <= n; ++r) stored.emplace_back(grid, p.row(r).transpose());
    result.hierarchy.orders.emplace(order, std::move(stored));
  }
  return result;
}

// ---------------------------------------------------------------------------

double order_residual(const JetHierarchy& hierarchy, int order) {
  const Series p = hierarchy.at(order);
  const Series dp = differentiate(p), ddp = differentiate(dp);
  const Series k1 = bilinear_source(hierarchy, order);
  const SecondJetPath& path = hierarchy.path2;
  const CoefficientSeries z = path.volume();
  const CoefficientSeries da = derivative(path.a), db = derivative(path.b);
  const CoefficientSeries dda = derivative(da), ddb = derivative(db);

  double worst = 0.0;
  for (int i = 0; i < hierarchy.grid->node_count(); ++i) {
    const Homogeneous P = to_homogeneous(at_node(p, i), order);
    const Homogeneous P1 = to_homogeneous(at_node(dp, i), order);
    Homogeneous r = to_homogeneous(at_node(ddp, i), order);
    r *= z[i];
    Homogeneous quad = Homogeneous::zero(2);
    quad.c[2] = dda[i];
    quad.c[0] = ddb[i];
    r += quad * P.laplacian();
    Homogeneous transport = Homogeneous::zero(order);
    for (int j = 0; j <= order; ++j) transport.c[j] = (da[i] * j + db[i] * (order - j)) * P1.c[j];
    transport *= -4.0;
    r += transport;
    Homogeneous k = to_homogeneous(at_node(k1, i), order);
    k *= -1.0;
    r += k;
    worst = std::max(worst, r.c.cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace gjl
