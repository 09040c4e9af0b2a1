// Command-line front end. Talks to the numerics only through the C API.
#include "gjl/gjl.h"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

constexpr int kInputError = GJL_INPUT_ERROR;

struct Options {
  std::string output;
  std::string plot;
  int nodes = 0;
  // second-jet
  double a0 = 0, b0 = 0, a1 = 0, b1 = 0;
  // propagate / pde-check
  std::string spec_path;
  int max_order = 0;
  // counterexample
  int n = 0;
  // pde-check
  int nt = 33, nx = 48, ny = 48, max_iterations = 40;
  std::vector<double> deltas{1e-1, 1e-2, 1e-3};
  std::string slices;
  // rerun
  std::string report_path;
};

int fail_input(const std::string& msg) {
  std::cerr << "error: " << msg << "\n";
  return kInputError;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  out = ss.str();
  return true;
}

bool write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

// GJL_DEFAULT_NODES overrides the library default; --nodes overrides both.
bool resolve_nodes(int& nodes) {
  if (nodes > 0) return true;
  if (nodes < 0) return false;
  nodes = gjl_default_nodes();
  if (const char* env = std::getenv("GJL_DEFAULT_NODES"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v <= 0 || v > 100000) return false;
    nodes = static_cast<int>(v);
  }
  return true;
}

// Columns t a b sigma2 for gnuplot; sigma2 may live on a sub-grid.
std::string plot_data(const json& r) {
  const json* src = &r;
  if (!r.contains("a") && r.contains("path2")) src = &r["path2"];
  const json& p = *src;
  if (!p.contains("t") || !p.contains("a") || !p.contains("b")) return {};
  const auto t = p["t"].get<std::vector<double>>();
  const auto a = p["a"].get<std::vector<double>>();
  const auto b = p["b"].get<std::vector<double>>();
  std::vector<double> s2(t.size(), std::numeric_limits<double>::quiet_NaN());
  if (p.contains("sigma2_nodewise")) {
    s2 = p["sigma2_nodewise"].get<std::vector<double>>();
  } else if (p.contains("sigma2_t") && p["sigma2"].is_array()) {
    const auto st = p["sigma2_t"].get<std::vector<double>>();
    const auto sv = p["sigma2"].get<std::vector<double>>();
    for (size_t i = 0, j = 0; i < t.size() && j < st.size(); ++i) {
      if (t[i] == st[j]) s2[i] = sv[j++];
    }
  }
  std::ostringstream out;
  out.precision(17);
  out << "# t a b sigma2\n";
  for (size_t i = 0; i < t.size(); ++i) out << t[i] << ' ' << a[i] << ' ' << b[i] << ' ' << s2[i] << '\n';
  return out.str();
}

std::string plot_script(const std::string& data_path) {
  std::ostringstream s;
  s << "# gnuplot script; pick a terminal before loading, e.g. set terminal pngcairo\n"
    << "set xlabel 't'\n"
    << "set ylabel 'a(t), b(t)'\n"
    << "set y2label 'sigma2(t)'\n"
    << "set ytics nomirror\n"
    << "set y2tics\n"
    << "set key outside\n"
    << "plot '" << data_path << "' using 1:2 with linespoints title 'a(t)', \\\n"
    << "     '" << data_path << "' using 1:3 with linespoints title 'b(t)', \\\n"
    << "     '" << data_path << "' using 1:4 axes x1y2 with linespoints title 'sigma2(t)'\n";
  return s.str();
}

int finish(gjl_status st, gjl_report* report, const Options& o) {
  if (st != GJL_OK) {
    std::cerr << "error: " << gjl_last_error() << "\n";
    return static_cast<int>(st);
  }
  const std::string text = gjl_report_json(report);
  const std::string csv = gjl_report_slices_csv(report);
  gjl_report_free(report);

  if (o.output.empty()) {
    std::cout << text;
  } else if (!write_file(o.output, text)) {
    return fail_input("cannot write " + o.output);
  }
  if (!o.slices.empty() && !write_file(o.slices, csv)) return fail_input("cannot write " + o.slices);
  if (!o.plot.empty()) {
    const std::string data = plot_data(json::parse(text));
    if (data.empty()) return fail_input("this report has no time series to plot");
    const std::string data_path = o.plot + ".dat";
    if (!write_file(data_path, data) || !write_file(o.plot + ".gp", plot_script(data_path))) {
      return fail_input("cannot write plot files with prefix " + o.plot);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jet-level laboratory for torus geodesics between potentials"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gjl_version()));
  Options o;

  auto common = [&](CLI::App* sub, bool with_nodes) {
    sub->add_option("-o,--output", o.output, "Write the JSON report here instead of stdout");
    sub->add_option("--plot", o.plot, "Also write PREFIX.dat and a gnuplot script PREFIX.gp");
    if (with_nodes) {
      sub->add_option("--nodes", o.nodes, "Time-grid nodes (default 64, or GJL_DEFAULT_NODES)")
          ->check(CLI::PositiveNumber);
    }
  };

  CLI::App* sj = app.add_subcommand("second-jet", "Solve the 2-jet boundary-value problem");
  sj->add_option("--a0", o.a0, "x^2 coefficient at t = 0")->required();
  sj->add_option("--b0", o.b0, "y^2 coefficient at t = 0")->required();
  sj->add_option("--a1", o.a1, "x^2 coefficient at t = 1")->required();
  sj->add_option("--b1", o.b1, "y^2 coefficient at t = 1")->required();
  common(sj, true);

  CLI::App* pr = app.add_subcommand("propagate", "Propagate higher jets and detect resonances");
  pr->add_option("--spec", o.spec_path, "Potential spec JSON file")->required()->check(CLI::ExistingFile);
  pr->add_option("--max-order", o.max_order, "Highest even degree to propagate")->required();
  common(pr, true);

  CLI::App* ce = app.add_subcommand("counterexample", "Run the obstruction demo for the h_n family");
  ce->add_option("--n", o.n, "Family index, n >= 3")->required();
  common(ce, true);

  CLI::App* pd = app.add_subcommand("pde-check", "Finite-difference cross-check of the 2-jets");
  pd->add_option("--spec", o.spec_path, "Potential spec JSON file (default: zero boundary)")
      ->check(CLI::ExistingFile);
  pd->add_option("--nt", o.nt, "Time slices")->capture_default_str();
  pd->add_option("--nx", o.nx, "Grid points in x (even)")->capture_default_str();
  pd->add_option("--ny", o.ny, "Grid points in y (even)")->capture_default_str();
  pd->add_option("--delta", o.deltas, "Regularization schedule, strictly decreasing")->capture_default_str();
  pd->add_option("--max-iterations", o.max_iterations, "Newton iterations per delta")->capture_default_str();
  pd->add_option("--slices", o.slices, "Write every time slice as CSV");
  common(pd, false);

  CLI::App* rr = app.add_subcommand("rerun", "Recompute a report from its embedded config");
  rr->add_option("report", o.report_path, "Earlier JSON report")->required()->check(CLI::ExistingFile);
  common(rr, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  if (!resolve_nodes(o.nodes)) return fail_input("GJL_DEFAULT_NODES must be a positive integer");

  gjl_report* report = nullptr;
  gjl_status st = GJL_OK;
  std::string text;
  if (*sj) {
    st = gjl_second_jet(o.a0, o.b0, o.a1, o.b1, o.nodes, &report);
  } else if (*ce) {
    st = gjl_counterexample(o.n, o.nodes, &report);
  } else if (*pr) {
    if (!read_file(o.spec_path, text)) return fail_input("cannot read " + o.spec_path);
    st = gjl_propagate(text.c_str(), o.max_order, o.nodes, &report);
  } else if (*pd) {
    text = "{}";
    if (!o.spec_path.empty() && !read_file(o.spec_path, text)) return fail_input("cannot read " + o.spec_path);
    const json grid = {{"nt", o.nt},
                       {"nx", o.nx},
                       {"ny", o.ny},
                       {"max_iterations", o.max_iterations},
                       {"delta_schedule", o.deltas}};
    st = gjl_pde_check(text.c_str(), grid.dump().c_str(), o.slices.empty() ? 0 : 1, &report);
  } else {
    if (!read_file(o.report_path, text)) return fail_input("cannot read " + o.report_path);
    st = gjl_rerun(text.c_str(), &report);
  }
  return finish(st, report, o);
}
