#include "gjl/gjl.h"

#include "gjl/error.hpp"
#include "gjl/report.hpp"
#include "gjl/timegrid.hpp"

#include <new>
#include <string>

struct gjl_report {
  std::string json;
  std::string slices_csv;
};

namespace {

thread_local std::string last_error;

gjl_status status_of(gjl::ErrorKind kind) {
  switch (kind) {
    case gjl::ErrorKind::InvalidArgument: return GJL_INPUT_ERROR;
    case gjl::ErrorKind::Domain:
    case gjl::ErrorKind::InvalidState: return GJL_PRECONDITION_ERROR;
    case gjl::ErrorKind::Numeric: return GJL_NUMERIC_ERROR;
    default: return GJL_INTERNAL_ERROR;
  }
}

int resolve_nodes(int nodes) { return nodes <= 0 ? gjl::kDefaultNodeCount : nodes; }

// Runs body, which fills a fresh report, and translates exceptions.
template <class F>
gjl_status guarded(gjl_report** out, F&& body) {
  last_error.clear();
  if (out == nullptr) {
    last_error = "output pointer is null";
    return GJL_INPUT_ERROR;
  }
  *out = nullptr;
  try {
    auto* r = new gjl_report;
    try {
      body(*r);
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
    return GJL_OK;
  } catch (const gjl::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const nlohmann::json::exception& e) {
    last_error = std::string("malformed JSON input: ") + e.what();
    return GJL_INPUT_ERROR;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return GJL_INTERNAL_ERROR;
  } catch (const std::exception& e) {
    last_error = e.what();
    return GJL_INTERNAL_ERROR;
  } catch (...) {
    last_error = "unknown failure";
    return GJL_INTERNAL_ERROR;
  }
}

std::string need_text(const char* s, const char* what) {
  if (s == nullptr) gjl::fail(gjl::ErrorKind::InvalidArgument, std::string(what) + " is null");
  return s;
}

gjl::GeodesicConfig grid_from_json(const char* text) {
  gjl::GeodesicConfig c;
  if (text == nullptr) return c;
  gjl::Json j;
  try {
    j = gjl::Json::parse(text);
  } catch (const gjl::Json::parse_error& e) {
    gjl::fail(gjl::ErrorKind::InvalidArgument, std::string("grid options are not valid JSON: ") + e.what());
  }
  if (!j.is_object()) gjl::fail(gjl::ErrorKind::InvalidArgument, "grid options must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "nt" || k == "nx" || k == "ny" || k == "max_iterations") {
      if (!it->is_number_integer()) gjl::fail(gjl::ErrorKind::InvalidArgument, "grid option " + k + " must be an integer");
      const int v = it->get<int>();
      (k == "nt" ? c.nt : k == "nx" ? c.nx : k == "ny" ? c.ny : c.max_iterations) = v;
    } else if (k == "delta_schedule") {
      if (!it->is_array()) gjl::fail(gjl::ErrorKind::InvalidArgument, "delta_schedule must be an array");
      c.delta_schedule.clear();
      for (const auto& d : *it) {
        if (!d.is_number()) gjl::fail(gjl::ErrorKind::InvalidArgument, "delta_schedule must hold numbers");
        c.delta_schedule.push_back(d.get<double>());
      }
    } else {
      gjl::fail(gjl::ErrorKind::InvalidArgument, "unknown grid option \"" + k + "\"");
    }
  }
  return c;
}

}  // namespace

extern "C" {

gjl_status gjl_second_jet(double a0, double b0, double a1, double b1, int nodes, gjl_report** out) {
  return guarded(out, [&](gjl_report& r) {
    r.json = gjl::dump_report(gjl::second_jet_report({a0, b0, a1, b1}, resolve_nodes(nodes)));
  });
}

gjl_status gjl_propagate(const char* spec_json, int max_order, int nodes, gjl_report** out) {
  return guarded(out, [&](gjl_report& r) {
    const gjl::ProblemSpec spec = gjl::parse_problem_spec(need_text(spec_json, "spec"));
    r.json = gjl::dump_report(gjl::propagate_report(spec, max_order, resolve_nodes(nodes)));
  });
}

gjl_status gjl_counterexample(int n, int nodes, gjl_report** out) {
  return guarded(out, [&](gjl_report& r) {
    r.json = gjl::dump_report(gjl::counterexample_report(n, resolve_nodes(nodes)));
  });
}

gjl_status gjl_pde_check(const char* spec_json, const char* grid_json, int with_slices, gjl_report** out) {
  return guarded(out, [&](gjl_report& r) {
    const gjl::ProblemSpec spec = gjl::parse_problem_spec(need_text(spec_json, "spec"));
    const gjl::GeodesicConfig cfg = grid_from_json(grid_json);
    r.json = gjl::dump_report(gjl::pde_report(spec, cfg, with_slices ? &r.slices_csv : nullptr));
  });
}

gjl_status gjl_rerun(const char* report_or_config_json, gjl_report** out) {
  return guarded(out, [&](gjl_report& r) {
    gjl::Json j;
    try {
      j = gjl::Json::parse(need_text(report_or_config_json, "report"));
    } catch (const gjl::Json::parse_error& e) {
      gjl::fail(gjl::ErrorKind::InvalidArgument, std::string("report is not valid JSON: ") + e.what());
    }
    if (j.is_object() && j.contains("config")) j = j["config"];
    r.json = gjl::dump_report(gjl::rerun_report(j));
  });
}

const char* gjl_report_json(const gjl_report* report) { return report ? report->json.c_str() : ""; }

const char* gjl_report_slices_csv(const gjl_report* report) { return report ? report->slices_csv.c_str() : ""; }

void gjl_report_free(gjl_report* report) { delete report; }

const char* gjl_last_error(void) { return last_error.c_str(); }

int gjl_default_nodes(void) { return gjl::kDefaultNodeCount; }

const char* gjl_version(void) { return "0.1.0"; }

}  // extern "C"
