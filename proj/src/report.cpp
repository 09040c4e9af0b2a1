#include "gjl/report.hpp"

#include "gjl/error.hpp"

#include <cmath>
#include <sstream>

namespace gjl {
namespace {

constexpr int kReferenceNodes = 64;

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }
std::vector<double> to_vector(const CoefficientSeries& s) { return to_vector(s.values()); }

[[noreturn]] void schema_error(const std::string& msg) { fail(ErrorKind::InvalidArgument, "spec: " + msg); }

const Json& member(const Json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(where + " is missing \"" + key + "\"");
  return *it;
}

double number(const Json& obj, const char* key, const std::string& where) {
  const Json& v = member(obj, key, where);
  if (!v.is_number()) schema_error(where + "." + key + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema_error(where + "." + key + " must be finite");
  return d;
}

int integer(const Json& obj, const char* key, const std::string& where) {
  const Json& v = member(obj, key, where);
  if (!v.is_number_integer()) schema_error(where + "." + key + " must be an integer");
  const long long i = v.get<long long>();
  if (i < -1000000 || i > 1000000) schema_error(where + "." + key + " is out of range");
  return static_cast<int>(i);
}

void only_keys(const Json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed) ok = ok || it.key() == k;
    if (!ok) schema_error(where + " has unknown key \"" + it.key() + "\"");
  }
}

PotentialInput parse_potential(const Json& p, const std::string& where) {
  if (!p.is_object()) schema_error(where + " must be an object");
  const int kinds = static_cast<int>(p.contains("terms")) + static_cast<int>(p.contains("jets")) +
                    static_cast<int>(p.contains("family"));
  if (kinds != 1) schema_error(where + " needs exactly one of \"terms\", \"jets\", \"family\"");

  PotentialInput in;
  if (p.contains("terms")) {
    only_keys(p, {"terms"}, where);
    const Json& arr = p["terms"];
    if (!arr.is_array()) schema_error(where + ".terms must be an array");
    std::vector<TrigTerm> terms;
    Json resolved = Json::array();
    for (size_t i = 0; i < arr.size(); ++i) {
      const std::string w = where + ".terms[" + std::to_string(i) + "]";
      if (!arr[i].is_object()) schema_error(w + " must be an object");
      only_keys(arr[i], {"coeff", "sin_x_power", "sin_y_power"}, w);
      TrigTerm t{number(arr[i], "coeff", w), integer(arr[i], "sin_x_power", w), integer(arr[i], "sin_y_power", w)};
      resolved.push_back({{"coeff", t.coeff}, {"sin_x_power", t.sin_x_power}, {"sin_y_power", t.sin_y_power}});
      terms.push_back(t);
    }
    in.trig = make_potential(std::move(terms));
    in.resolved = {{"terms", resolved}};
  } else if (p.contains("family")) {
    const Json& f = p["family"];
    if (!f.is_string()) schema_error(where + ".family must be a string");
    const std::string name = f.get<std::string>();
    if (name == "h") {
      only_keys(p, {"family", "n"}, where);
      const int n = integer(p, "n", where);
      in.trig = build_h(n);
      in.resolved = {{"family", "h"}, {"n", n}};
    } else if (name == "h_tilde") {
      only_keys(p, {"family", "n", "kappa", "chi"}, where);
      const int n = integer(p, "n", where), kappa = integer(p, "kappa", where);
      const double chi = number(p, "chi", where);
      in.trig = build_h_tilde(n, kappa, chi);
      in.resolved = {{"family", "h_tilde"}, {"n", n}, {"kappa", kappa}, {"chi", chi}};
    } else {
      schema_error(where + ".family must be \"h\" or \"h_tilde\", got \"" + name + "\"");
    }
  } else {
    only_keys(p, {"jets"}, where);
    const Json& jets = p["jets"];
    if (!jets.is_object()) schema_error(where + ".jets must be an object keyed by degree");
    Json resolved = Json::object();
    for (auto it = jets.begin(); it != jets.end(); ++it) {
      const std::string w = where + ".jets[\"" + it.key() + "\"]";
      size_t used = 0;
      int d = 0;
      try {
        d = std::stoi(it.key(), &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != it.key().size() || d < 2 || d > 200) schema_error(w + ": degree must be an integer in [2, 200]");
      if (!it->is_array()) schema_error(w + " must be an array of numbers");
      Eigen::VectorXd v(static_cast<long>(it->size()));
      for (size_t i = 0; i < it->size(); ++i) {
        if (!(*it)[i].is_number()) schema_error(w + " must be an array of numbers");
        v[static_cast<long>(i)] = (*it)[i].get<double>();
        if (!std::isfinite(v[static_cast<long>(i)])) schema_error(w + " has a non-finite entry");
      }
      in.jets[d] = v;
      resolved[std::to_string(d)] = to_vector(v);
    }
    in.resolved = {{"jets", resolved}};
  }
  return in;
}

Json obstruction_json(const ObstructionReport& r) {
  return {{"resonant_order", r.resonant_order}, {"multiple", r.multiple}, {"u", r.u},        {"v", r.v},
          {"K", r.K},                           {"lhs", r.lhs},           {"residual", r.residual},
          {"satisfied", r.satisfied}};
}

std::vector<std::string> monomial_names(int degree) {
  std::vector<std::string> names;
  for (int i = 0; i <= degree / 2; ++i) {
    const int px = degree - 2 * i, py = 2 * i;
    std::string s;
    if (px > 0) s += "x^" + std::to_string(px);
    if (px > 0 && py > 0) s += " ";
    if (py > 0) s += "y^" + std::to_string(py);
    names.push_back(s);
  }
  return names;
}

Json tolerances() {
  return {{"resonance", kResonanceTolerance},
          {"near_resonance", kNearResonanceTolerance},
          {"compatibility", kCompatibilityTolerance}};
}

Json path_json(const SecondJetPath& p) {
  Json r;
  r["causal_class"] = to_string(p.causal_class);
  if (p.causal_class == CausalClass::SpaceLike) r["epsilon"] = p.epsilon;
  r["swapped_axes"] = p.swapped_axes;
  r["t"] = to_vector(p.a.grid().nodes());
  r["a"] = to_vector(p.a);
  r["b"] = to_vector(p.b);
  r["sigma1"] = to_vector(p.sigma1);
  r["sigma2"] = p.sigma2;
  const CoefficientSeries s2 = sigma2_series(p.a, p.b);
  r["sigma2_nodewise"] = to_vector(s2);
  r["sigma2_spread"] = s2.values().maxCoeff() - s2.values().minCoeff();
  r["ode_residual"] = ode_residual(p);
  if (p.hyperbola) r["hyperbola"] = {{"lambda", p.hyperbola->lambda}, {"c", p.hyperbola->c}};
  return r;
}

SecondJetBoundary boundary_of(const PotentialInput& phi0, const PotentialInput& phi1) {
  const Eigen::VectorXd j0 = even_jet(phi0.jets_to(2), 2), j1 = even_jet(phi1.jets_to(2), 2);
  return {j0[0], j0[1], j1[0], j1[1]};
}

GeodesicConfig geodesic_config(const Json& c) {
  const std::string w = "config";
  GeodesicConfig g;
  g.nt = integer(c, "nt", w);
  g.nx = integer(c, "nx", w);
  g.ny = integer(c, "ny", w);
  g.max_iterations = integer(c, "max_iterations", w);
  const Json& d = member(c, "delta_schedule", w);
  if (!d.is_array()) schema_error("config.delta_schedule must be an array");
  g.delta_schedule.clear();
  for (const Json& x : d) {
    if (!x.is_number()) schema_error("config.delta_schedule must hold numbers");
    g.delta_schedule.push_back(x.get<double>());
  }
  return g;
}

}  // namespace

bool PotentialInput::is_zero() const {
  if (trig) {
    for (const TrigTerm& t : trig->terms)
      if (t.coeff != 0.0) return false;
    return true;
  }
  for (const auto& [d, v] : jets)
    if (v.size() > 0 && v.cwiseAbs().maxCoeff() != 0.0) return false;
  return true;
}

JetData PotentialInput::jets_to(int order) const {
  if (trig) return jets_at_origin(*trig, order);
  JetData out;
  for (const auto& [d, v] : jets)
    if (d <= order) out[d] = v;
  return out;
}

ProblemSpec parse_problem_spec(const Json& spec) {
  if (!spec.is_object()) schema_error("top level must be an object");
  only_keys(spec, {"phi0", "phi1", "description"}, "spec");
  ProblemSpec out;
  const Json zero = {{"terms", Json::array()}};
  out.phi0 = parse_potential(spec.contains("phi0") ? spec["phi0"] : zero, "phi0");
  out.phi1 = parse_potential(spec.contains("phi1") ? spec["phi1"] : zero, "phi1");
  out.resolved = {{"phi0", out.phi0.resolved}, {"phi1", out.phi1.resolved}};
  return out;
}

ProblemSpec parse_problem_spec(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    schema_error(std::string("not valid JSON: ") + e.what());
  }
  return parse_problem_spec(j);
}

Json second_jet_report(const SecondJetBoundary& bd, int nodes) {
  Json r;
  r["config"] = {{"command", "second-jet"}, {"a0", bd.a0}, {"b0", bd.b0}, {"a1", bd.a1}, {"b1", bd.b1},
                 {"nodes", nodes}};
  const SecondJetPath p = solve_bvp(bd, TimeGrid::make(nodes));
  r["connectable"] = true;
  r.update(path_json(p));
  return r;
}

Json propagate_report(const ProblemSpec& spec, int max_order, int nodes) {
  Json r;
  r["config"] = {{"command", "propagate"}, {"max_order", max_order}, {"nodes", nodes},
                 {"spec", spec.resolved},  {"tolerances", tolerances()}};
  const GridPtr grid = TimeGrid::make(nodes);
  const PropagationResult res = propagate(spec.phi0.jets_to(max_order), spec.phi1.jets_to(max_order), max_order, grid);
  const JetHierarchy& h = res.hierarchy;
  r["path2"] = path_json(h.path2);
  r["t"] = to_vector(grid->nodes());
  Json orders = Json::array();
  orders.push_back({{"order", 2},
                    {"monomials", monomial_names(2)},
                    {"coefficients", {to_vector(h.path2.a), to_vector(h.path2.b)}},
                    {"residual", ode_residual(h.path2)}});
  for (const auto& [order, series] : h.orders) {
    Json coeffs = Json::array();
    for (const CoefficientSeries& s : series) coeffs.push_back(to_vector(s));
    orders.push_back({{"order", order},
                      {"monomials", monomial_names(order)},
                      {"coefficients", coeffs},
                      {"residual", order_residual(h, order)}});
  }
  r["orders"] = orders;
  r["max_order_reached"] = h.max_order();
  r["obstruction"] = res.obstruction ? obstruction_json(*res.obstruction) : Json(nullptr);
  r["beyond_proven_range"] = res.beyond_proven_range;
  r["warnings"] = res.warnings;
  return r;
}

Json counterexample_report(int n, int nodes) {
  Json r;
  r["config"] = {{"command", "counterexample"}, {"n", n}, {"nodes", nodes}, {"tolerances", tolerances()}};
  const GridPtr grid = TimeGrid::make(nodes);
  const ObstructionDemo d = obstruction_demo(n, grid);
  r["n"] = d.n;
  r["epsilon"] = d.epsilon;
  r["epsilon_expected"] = d.epsilon_expected;
  r["epsilon_ok"] = d.epsilon_ok;
  r["resonant_order"] = d.resonant_order;
  r["kappa"] = d.kappa;
  r["chi"] = d.chi;
  r["v"] = d.v;
  r["v_kappa"] = d.v_kappa;
  r["K"] = d.h_report.K;
  r["lhs_h"] = d.h_report.lhs;
  r["lhs_htilde"] = d.h_tilde_report.lhs;
  r["difference"] = d.lhs_difference;
  r["predicted_difference"] = d.predicted_difference;
  r["shared_data_gap"] = d.shared_data_gap;
  r["h_report"] = obstruction_json(d.h_report);
  r["h_tilde_report"] = obstruction_json(d.h_tilde_report);
  r["conclusion"] = d.conclusion;
  const JetData j = jets_at_origin(build_h(n), 2);
  r["path2"] = path_json(solve_bvp({0.0, 0.0, j.at(2)[0], j.at(2)[1]}, grid));
  return r;
}

Json pde_report(const ProblemSpec& spec, const GeodesicConfig& config, std::string* slices_csv) {
  if (!spec.phi0.is_zero()) schema_error("pde-check needs phi0 = 0");
  if (!spec.phi1.is_trig()) schema_error("pde-check needs phi1 as trig terms or a family, not raw jets");
  Json r;
  r["config"] = {{"command", "pde-check"},
                 {"nt", config.nt},
                 {"nx", config.nx},
                 {"ny", config.ny},
                 {"delta_schedule", config.delta_schedule},
                 {"max_iterations", config.max_iterations},
                 {"reference_nodes", kReferenceNodes},
                 {"spec", spec.resolved}};
  const GridSolution sol = solve_geodesic(*spec.phi1.trig, config);
  const SecondJetPath ref = solve_bvp(boundary_of(spec.phi0, spec.phi1), TimeGrid::make(kReferenceNodes));
  const CrosscheckReport rep = crosscheck_report(sol, ref);
  r["t"] = rep.t;
  r["a"] = rep.a;
  r["b"] = rep.b;
  r["sigma2_t"] = rep.sigma2_t;
  r["sigma2"] = rep.sigma2;
  r["sigma2_mean"] = rep.sigma2_mean;
  r["sigma2_spread"] = rep.sigma2_spread;
  r["epsilon_pde"] = rep.epsilon_pde;
  r["epsilon_reference"] = rep.epsilon_reference;
  r["epsilon_deviation"] = rep.epsilon_deviation;
  r["reference_class"] = to_string(ref.causal_class);
  r["residual_norm"] = sol.residual_norm;
  Json stages = Json::array();
  for (size_t s = 0; s < sol.stages.size(); ++s) {
    stages.push_back({{"delta", sol.stages[s].delta},
                      {"iterations", sol.stages[s].iterations},
                      {"residual", sol.stages[s].residual},
                      {"sigma2_spread", rep.stage_spreads[s]}});
  }
  r["stages"] = stages;
  if (slices_csv) {
    std::ostringstream out;
    write_slices_csv(sol, out);
    *slices_csv = out.str();
  }
  return r;
}

Json rerun_report(const Json& config) {
  if (!config.is_object()) schema_error("config must be an object");
  const Json& cmd = member(config, "command", "config");
  if (!cmd.is_string()) schema_error("config.command must be a string");
  const std::string c = cmd.get<std::string>();
  const std::string w = "config";
  if (c == "second-jet") {
    return second_jet_report({number(config, "a0", w), number(config, "b0", w), number(config, "a1", w),
                              number(config, "b1", w)},
                             integer(config, "nodes", w));
  }
  if (c == "propagate") {
    return propagate_report(parse_problem_spec(member(config, "spec", w)), integer(config, "max_order", w),
                            integer(config, "nodes", w));
  }
  if (c == "counterexample") return counterexample_report(integer(config, "n", w), integer(config, "nodes", w));
  if (c == "pde-check") return pde_report(parse_problem_spec(member(config, "spec", w)), geodesic_config(config));
  schema_error("unknown command \"" + c + "\"");
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

}  // namespace gjl
