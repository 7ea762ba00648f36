#ifndef INFPROJ_CONFIG_HPP
#define INFPROJ_CONFIG_HPP

#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "core.hpp"
#include "mspg.hpp"
#include "stspg.hpp"

namespace infproj {

using json = nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json &obj, const char *where,
                                const std::set<std::string> &allowed) {
  if (!obj.is_object()) throw config_error(std::string(where) + ": expected an object");
  for (const auto &[key, _] : obj.items())
    if (!allowed.count(key))
      throw config_error(std::string(where) + ": unknown key '" + key + "'");
}

template <class T>
T get_or(const json &obj, const char *key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception &) {
    throw config_error(std::string("bad value for '") + key + "'");
  }
}

template <class T>
T require(const json &obj, const char *key, const char *where) {
  if (!obj.contains(key))
    throw config_error(std::string(where) + ": missing required key '" + key +
                       "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception &) {
    throw config_error(std::string(where) + ": bad value for '" + key + "'");
  }
}

}  // namespace detail

// Expands the tuning-grid shorthand "10^{a:b}" into explicit values.
inline std::vector<double> expand_pow10_grid(const std::string &spec) {
  const std::string prefix = "10^{";
  if (spec.rfind(prefix, 0) != 0 || spec.back() != '}')
    throw config_error("grid: expected form 10^{a:b}, got '" + spec + "'");
  const std::string body = spec.substr(prefix.size(),
                                       spec.size() - prefix.size() - 1);
  const auto colon = body.find(':');
  if (colon == std::string::npos)
    throw config_error("grid: expected form 10^{a:b}, got '" + spec + "'");
  const int a = std::stoi(body.substr(0, colon));
  const int b = std::stoi(body.substr(colon + 1));
  std::vector<double> out;
  const int lo = std::min(a, b), hi = std::max(a, b);
  for (int e = lo; e <= hi; ++e) out.push_back(std::pow(10.0, e));
  if (a > b) std::reverse(out.begin(), out.end());
  return out;
}

struct logging_config {
  long interval = 0;  // 0 = solver default
  bool dense_trace = false;
};

struct output_config {
  std::string dir = "out";
  std::string trace = "trace.csv";
  std::string summary = "summary.json";
  std::string chart = "chart.svg";
};

struct solver_entry {
  std::string name;   // st_spg | mspg | bmd | sgd_erm
  std::string label;  // defaults to name
  json params;        // validated at dispatch
};

struct run_config {
  std::string dataset_path;
  std::optional<index_t> dim_override;
  double train_fraction = 0.8;
  std::uint64_t split_seed = 0;
  std::optional<std::size_t> subsample_count;
  std::uint64_t subsample_seed = 0;
  loss_kind loss = loss_kind::logistic;
  std::optional<double> alpha_trunc;  // default sqrt(10 n) when truncated
  double lambda = 0.0;
  bool lambda_given = false;
  std::uint64_t seed = 0;
  logging_config logging;
  output_config output;
  std::vector<solver_entry> solvers;  // exactly one for `run`
  bool log_x = false;                 // bench chart option
};

namespace detail {

inline solver_entry parse_solver_entry(const json &j, const char *where) {
  reject_unknown_keys(j, where, {"name", "label", "params", "grid"});
  solver_entry e;
  e.name = require<std::string>(j, "name", where);
  static const std::set<std::string> known = {"st_spg", "mspg", "bmd",
                                              "sgd_erm"};
  if (!known.count(e.name))
    throw config_error(std::string(where) + ": unknown solver '" + e.name +
                       "'");
  e.label = get_or<std::string>(j, "label", e.name);
  e.params = j.contains("params") ? j.at("params") : json::object();
  if (!e.params.is_object())
    throw config_error(std::string(where) + ": params must be an object");
  return e;
}

// The optional "grid" key maps parameter names to pow-10 grid strings or
// explicit arrays; each combination becomes one labeled entry.
inline std::vector<solver_entry> expand_entry_grid(const json &j,
                                                   const solver_entry &base) {
  if (!j.contains("grid")) return {base};
  const json &grid = j.at("grid");
  if (!grid.is_object()) throw config_error("grid must be an object");
  std::vector<solver_entry> out = {base};
  for (const auto &[param, spec] : grid.items()) {
    std::vector<double> values;
    if (spec.is_string()) {
      values = expand_pow10_grid(spec.get<std::string>());
    } else if (spec.is_array()) {
      for (const auto &v : spec) values.push_back(v.get<double>());
    } else {
      throw config_error("grid values must be strings or arrays");
    }
    std::vector<solver_entry> next;
    for (const solver_entry &e : out) {
      for (double v : values) {
        solver_entry e2 = e;
        e2.params[param] = v;
        char buf[48];
        std::snprintf(buf, sizeof(buf), " %s=%g", param.c_str(), v);
        e2.label += buf;
        next.push_back(std::move(e2));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace detail

// Parses and schema-validates a run/bench configuration document.
// `bench` allows a "solvers" array; `run` requires a single "solver" entry.
inline run_config parse_run_config(const json &j, bool bench) {
  detail::reject_unknown_keys(
      j, "config",
      {"dataset", "dim_override", "split", "subsample", "loss", "alpha_trunc",
       "lambda", "solver", "solvers", "logging", "output", "seed", "log_x"});
  run_config cfg;
  cfg.dataset_path = detail::require<std::string>(j, "dataset", "config");
  if (j.contains("dim_override"))
    cfg.dim_override = detail::require<index_t>(j, "dim_override", "config");

  const json split = j.contains("split") ? j.at("split") : json::object();
  detail::reject_unknown_keys(split, "split", {"train_fraction", "seed"});
  cfg.train_fraction = detail::get_or<double>(split, "train_fraction", 0.8);
  cfg.split_seed = detail::get_or<std::uint64_t>(split, "seed", 0);

  if (j.contains("subsample")) {
    const json &sub = j.at("subsample");
    detail::reject_unknown_keys(sub, "subsample", {"count", "seed"});
    cfg.subsample_count =
        detail::require<std::size_t>(sub, "count", "subsample");
    cfg.subsample_seed = detail::get_or<std::uint64_t>(sub, "seed", 0);
  }

  const std::string loss = detail::get_or<std::string>(j, "loss", "logistic");
  if (loss == "logistic") {
    cfg.loss = loss_kind::logistic;
  } else if (loss == "truncated_logistic") {
    cfg.loss = loss_kind::truncated_logistic;
  } else {
    throw config_error("config: unknown loss '" + loss + "'");
  }
  if (j.contains("alpha_trunc"))
    cfg.alpha_trunc = detail::require<double>(j, "alpha_trunc", "config");
  cfg.lambda_given = j.contains("lambda");
  cfg.lambda = detail::get_or<double>(j, "lambda", 0.0);
  cfg.seed = detail::get_or<std::uint64_t>(j, "seed", 0);
  cfg.log_x = detail::get_or<bool>(j, "log_x", false);

  const json logging =
      j.contains("logging") ? j.at("logging") : json::object();
  detail::reject_unknown_keys(logging, "logging", {"interval", "dense_trace"});
  cfg.logging.interval = detail::get_or<long>(logging, "interval", 0);
  cfg.logging.dense_trace =
      detail::get_or<bool>(logging, "dense_trace", false);

  const json output = j.contains("output") ? j.at("output") : json::object();
  detail::reject_unknown_keys(output, "output",
                              {"dir", "trace", "summary", "chart"});
  cfg.output.dir = detail::get_or<std::string>(output, "dir", "out");
  cfg.output.trace = detail::get_or<std::string>(output, "trace", "trace.csv");
  cfg.output.summary =
      detail::get_or<std::string>(output, "summary", "summary.json");
  cfg.output.chart = detail::get_or<std::string>(output, "chart", "chart.svg");

  if (bench) {
    if (!j.contains("solvers") || !j.at("solvers").is_array() ||
        j.at("solvers").empty())
      throw config_error("config: bench needs a non-empty 'solvers' array");
    for (const json &e : j.at("solvers")) {
      const solver_entry base = detail::parse_solver_entry(e, "solvers[]");
      for (solver_entry &x : detail::expand_entry_grid(e, base))
        cfg.solvers.push_back(std::move(x));
    }
  } else {
    if (!j.contains("solver"))
      throw config_error("config: missing 'solver' entry");
    const json &e = j.at("solver");
    if (e.is_string()) {
      solver_entry entry;
      entry.name = e.get<std::string>();
      entry.label = entry.name;
      entry.params = json::object();
      static const std::set<std::string> known = {"st_spg", "mspg", "bmd",
                                                  "sgd_erm"};
      if (!known.count(entry.name))
        throw config_error("config: unknown solver '" + entry.name + "'");
      cfg.solvers.push_back(std::move(entry));
    } else {
      cfg.solvers.push_back(detail::parse_solver_entry(e, "solver"));
    }
  }
  return cfg;
}

inline run_config parse_run_config_text(const std::string &text, bool bench) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception &e) {
    throw config_error(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_run_config(j, bench);
}

// --- per-solver parameter schemas ---

inline stspg_config parse_stspg_params(const json &p) {
  detail::reject_unknown_keys(
      p, "st_spg params",
      {"stages", "gamma", "mu", "alpha_samp", "schedule", "fixed_iters",
       "rule_x", "rule_y", "batch", "y_cap", "diagnose_vhat", "vhat_factor"});
  stspg_config c;
  c.stages = detail::get_or<long>(p, "stages", 10);
  c.gamma = detail::get_or<double>(p, "gamma", 1.0);
  c.mu = detail::get_or<double>(p, "mu", 1.0);
  c.alpha_samp = detail::get_or<double>(p, "alpha_samp", 1.0);
  const std::string sched =
      detail::get_or<std::string>(p, "schedule", "paper");
  if (sched == "paper") {
    c.schedule = stage_schedule_kind::paper;
  } else if (sched == "fixed") {
    c.schedule = stage_schedule_kind::fixed;
  } else {
    throw config_error("st_spg: unknown schedule '" + sched + "'");
  }
  c.fixed_iters = detail::get_or<long>(p, "fixed_iters", 0);
  auto rule = [](const std::string &s) {
    if (s == "smooth") return spg_rule::smooth;
    if (s == "nonsmooth") return spg_rule::nonsmooth;
    throw config_error("unknown SPG step rule '" + s + "'");
  };
  c.rule_x = rule(detail::get_or<std::string>(p, "rule_x", "nonsmooth"));
  c.rule_y = rule(detail::get_or<std::string>(p, "rule_y", "nonsmooth"));
  c.batch = detail::get_or<long>(p, "batch", 1);
  c.y_cap = detail::get_or<double>(p, "y_cap",
                                   std::numeric_limits<double>::infinity());
  c.diagnose_vhat = detail::get_or<bool>(p, "diagnose_vhat", false);
  c.vhat_factor = detail::get_or<long>(p, "vhat_factor", 50);
  return c;
}

inline mspg_config parse_mspg_params(const json &p) {
  detail::reject_unknown_keys(p, "mspg params",
                              {"iters", "c", "b", "batch_cap", "l_override",
                               "y_cap", "check_bridge"});
  mspg_config c;
  c.iters = detail::get_or<long>(p, "iters", 1000);
  c.c = detail::get_or<double>(p, "c", 0.1);
  c.b = detail::get_or<long>(p, "b", 1);
  c.batch_cap = detail::get_or<long>(p, "batch_cap", 0);
  c.l_override = detail::get_or<double>(p, "l_override", 0.0);
  c.y_cap = detail::get_or<double>(p, "y_cap", 0.0);
  c.check_bridge = detail::get_or<bool>(p, "check_bridge", true);
  return c;
}

struct bmd_params {
  double eta_theta = 0.1;
  double eta_p = 1e-6;
  double rho = 0.0;                      // absolute units
  std::optional<double> rho_n_pow10;     // rho = n * 10^j
  long iters = 1000;
  long batch = 16;
};

inline bmd_params parse_bmd_params(const json &p) {
  detail::reject_unknown_keys(
      p, "bmd params",
      {"eta_theta", "eta_p", "rho", "rho_n_pow10", "iters", "batch"});
  bmd_params c;
  c.eta_theta = detail::get_or<double>(p, "eta_theta", 0.1);
  c.eta_p = detail::get_or<double>(p, "eta_p", 1e-6);
  c.rho = detail::get_or<double>(p, "rho", 0.0);
  if (p.contains("rho_n_pow10"))
    c.rho_n_pow10 = detail::require<double>(p, "rho_n_pow10", "bmd params");
  if (c.rho <= 0.0 && !c.rho_n_pow10)
    throw config_error("bmd: set rho or rho_n_pow10");
  c.iters = detail::get_or<long>(p, "iters", 1000);
  c.batch = detail::get_or<long>(p, "batch", 16);
  return c;
}

struct sgd_params {
  double eta = 0.1;
  long iters = 1000;
  long batch = 16;
};

inline sgd_params parse_sgd_params(const json &p) {
  detail::reject_unknown_keys(p, "sgd_erm params", {"eta", "iters", "batch"});
  sgd_params c;
  c.eta = detail::get_or<double>(p, "eta", 0.1);
  c.iters = detail::get_or<long>(p, "iters", 1000);
  c.batch = detail::get_or<long>(p, "batch", 16);
  return c;
}

}  // namespace infproj

#endif
