#ifndef INFPROJ_RUNNER_HPP
#define INFPROJ_RUNNER_HPP

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <thread>

#include "baselines.hpp"
#include "chart.hpp"
#include "config.hpp"
#include "dataset.hpp"
#include "mspg.hpp"
#include "problem.hpp"
#include "stspg.hpp"
#include "trace.hpp"

namespace infproj {

struct run_overrides {
  std::optional<std::uint64_t> seed;
  std::optional<long> log_every;
  std::optional<bool> dense_trace;
  std::optional<std::string> out_dir;
};

struct prepared_data {
  dataset train;
  dataset test;
  std::size_t n_total = 0;
};

inline prepared_data load_and_split(const run_config &cfg) {
  dataset full = parse_libsvm_file(cfg.dataset_path, cfg.dim_override);
  const std::size_t n_total = full.n();
  if (cfg.subsample_count)
    full = subsample(full, *cfg.subsample_count, cfg.subsample_seed);
  auto [train, test] =
      split_train_test(full, cfg.train_fraction, cfg.split_seed);
  return {std::move(train), std::move(test), n_total};
}

enum class trace_clock {
  work,  // deterministic solver work clock (run traces)
  cpu    // measured process CPU time (bench traces)
};

// Observer that turns solver log events into trace rows: fills in the
// objective F, its gradient norm and the split errors, and stamps the
// configured clock.
class run_sink final : public solver_observer {
 public:
  run_sink(const variance_reg_problem &prob, const dataset &train,
           const dataset &test, std::ostream &out, std::string solver_label,
           trace_clock clock)
      : prob_(&prob),
        train_(&train),
        test_(&test),
        out_(&out),
        label_(std::move(solver_label)),
        clock_(clock),
        cpu_start_(process_cpu_seconds()) {}

  void log(const log_event &ev) override {
    trace_record r;
    r.solver = label_;
    r.stage_or_iter = ev.step;
    if (clock_ == trace_clock::cpu) {
      r.cpu_seconds = process_cpu_seconds() - cpu_start_;
    } else {
      r.cpu_seconds = std::isfinite(ev.work_seconds) ? ev.work_seconds : 0.0;
      r.cpu_seconds = std::max(r.cpu_seconds, last_clock_);
    }
    last_clock_ = r.cpu_seconds;
    const bool canonical = ev.canonical;
    if (canonical && std::isfinite(ev.objective)) {
      r.objective_F = ev.objective;
      r.grad_norm = ev.grad_norm;
    } else {
      r.objective_F = prob_->eval_F(*ev.x);
      dvec g;
      prob_->full_gradient_F(*ev.x, g);
      r.grad_norm = norm(g);
    }
    r.train_error = error01(*train_, *ev.x);
    r.test_error = error01(*test_, *ev.x);
    r.extras = ev.extras;
    if (!canonical) {
      r.extras.emplace_back(
          "solver_obj", std::isfinite(ev.objective) ? ev.objective : 0.0);
      r.extras.emplace_back(
          "solver_grad", std::isfinite(ev.grad_norm) ? ev.grad_norm : 0.0);
    }
    if (!writer_) {
      std::vector<std::string> keys;
      for (const auto &[k, _] : r.extras) keys.push_back(k);
      writer_.emplace(*out_, std::move(keys));
    }
    writer_->write(r);
    last_ = r;
    ++rows_;
  }

  const trace_record &last() const { return last_; }
  std::size_t rows() const { return rows_; }

 private:
  const variance_reg_problem *prob_;
  const dataset *train_;
  const dataset *test_;
  std::ostream *out_;
  std::string label_;
  trace_clock clock_;
  double cpu_start_;
  double last_clock_ = 0.0;
  std::optional<trace_writer> writer_;
  trace_record last_;
  std::size_t rows_ = 0;
};

struct solver_outcome {
  dvec final_x;
  json detail = json::object();
  double solve_seconds = 0.0;  // monotonic, solver loop only
  std::uint64_t work_units = 0;
  long iterations = 0;
};

template <class Duration>
double seconds_of(Duration d) {
  return std::chrono::duration<double>(d).count();
}

// Runs one solver entry against a prepared problem, streaming rows into the
// sink. Throws on divergence or invalid parameters.
inline solver_outcome dispatch_solver(const solver_entry &entry,
                                      const variance_reg_problem &prob,
                                      long log_every, std::uint64_t seed,
                                      run_sink &sink,
                                      std::vector<stage_snapshot> *snaps,
                                      bool dense_trace = false) {
  solver_outcome out;
  if (entry.name == "st_spg") {
    stspg_config c = parse_stspg_params(entry.params);
    c.seed = seed;
    c.collect_inner = dense_trace;
    const stspg_result res = st_spg(prob, c, nullptr, nullptr, &sink);
    out.final_x = res.x_last;
    out.solve_seconds = res.solve_seconds;
    out.work_units = res.work_units;
    out.iterations = res.inner_iterations;
    out.detail["tau"] = res.tau;
    out.detail["stages"] = c.stages;
    out.detail["inner_iterations"] = res.inner_iterations;
    dvec g;
    prob.full_gradient_F(res.x_tau_next, g);
    out.detail["grad_norm_x_tau_next"] = norm(g);
    prob.full_gradient_F(res.x_tau, g);
    out.detail["grad_norm_x_tau"] = norm(g);
    out.detail["inner_seconds"] = res.inner_seconds;
    out.detail["per_inner_iteration_seconds"] =
        res.inner_seconds / std::max<long>(1, res.inner_iterations);
    if (snaps) *snaps = res.snapshots;
  } else if (entry.name == "mspg") {
    mspg_config c = parse_mspg_params(entry.params);
    c.seed = seed;
    c.log_every = dense_trace ? 1 : log_every;
    const mspg_result res = mspg(prob, c, &sink);
    out.final_x = res.x_last;
    out.solve_seconds = res.solve_seconds;
    out.work_units = res.work_units;
    out.iterations = c.iters;
    out.detail["tau"] = res.tau;
    out.detail["eta"] = res.eta;
    out.detail["smoothness_L"] = res.l_used;
    out.detail["y_cap"] = res.d_y;
    out.detail["full_batch_from"] = res.full_batch_from;
    out.detail["objective_gap"] = res.objective_gap;
    out.detail["c1"] = res.c1;
    out.detail["c2"] = res.c2;
    out.detail["sigma0_sq"] = res.sigma0_sq;
    dvec g;
    prob.full_gradient_F(res.x_tau, g);
    out.detail["grad_norm_x_tau"] = norm(g);
  } else if (entry.name == "bmd") {
    bmd_params bp = parse_bmd_params(entry.params);
    bmd_config c;
    c.eta_theta = bp.eta_theta;
    c.eta_p = bp.eta_p;
    c.rho = bp.rho_n_pow10 ? static_cast<double>(prob.n_samples()) *
                                 std::pow(10.0, *bp.rho_n_pow10)
                           : bp.rho;
    c.iters = bp.iters;
    c.batch = bp.batch;
    c.seed = seed;
    c.log_every = log_every;
    c.measure_timing = true;
    const bmd_result res = bmd_minmax(prob, c, &sink);
    out.final_x = res.theta;
    out.solve_seconds = res.solve_seconds;
    out.work_units = res.work_units;
    out.iterations = res.iters;
    out.detail["rho"] = c.rho;
    out.detail["chi2_final"] = chi2_divergence(res.weights.p);
    out.detail["dual_update_seconds"] = res.dual_update_seconds;
    out.detail["per_iteration_dual_seconds"] =
        res.dual_update_seconds / static_cast<double>(res.iters);
  } else if (entry.name == "sgd_erm") {
    sgd_params sp = parse_sgd_params(entry.params);
    sgd_config c;
    c.eta = sp.eta;
    c.iters = sp.iters;
    c.batch = sp.batch;
    c.seed = seed;
    c.log_every = log_every;
    const sgd_result res = sgd_erm(prob, c, &sink);
    out.final_x = res.theta;
    out.solve_seconds = res.solve_seconds;
    out.work_units = res.work_units;
    out.iterations = res.iters;
  } else {
    throw config_error("unknown solver '" + entry.name + "'");
  }
  return out;
}

inline void warn_if_lambda_ignored(const run_config &cfg,
                                   const solver_entry &entry) {
  if (cfg.lambda_given && cfg.lambda != 0.0 &&
      (entry.name == "sgd_erm" || entry.name == "bmd"))
    std::fprintf(stderr,
                 "[infproj] warning: lambda = %g is ignored by solver '%s'\n",
                 cfg.lambda, entry.name.c_str());
}

inline json dataset_summary(const run_config &cfg, const prepared_data &data) {
  return {{"path", cfg.dataset_path},
          {"n_total", data.n_total},
          {"n_train", data.train.n()},
          {"n_test", data.test.n()},
          {"dim", data.train.dim()}};
}

inline json final_metrics(const variance_reg_problem &prob,
                          const prepared_data &data, const dvec &x) {
  dvec g;
  prob.full_gradient_F(x, g);
  return {{"objective_F", prob.eval_F(x)},
          {"grad_norm", norm(g)},
          {"train_error", error01(data.train, x)},
          {"test_error", error01(data.test, x)},
          {"y_star", prob.inner_minimizer_ystar(x)}};
}

inline double resolve_alpha_trunc(const run_config &cfg, std::size_t n) {
  if (cfg.alpha_trunc) return *cfg.alpha_trunc;
  // experimental default alpha = sqrt(10 n)
  return std::sqrt(10.0 * static_cast<double>(n));
}

// `run`: one solver, deterministic work-clock trace + summary JSON.
// Returns the process exit code.
inline int cmd_run(const run_config &cfg, const run_overrides &ovr,
                   const json &config_echo) {
  namespace fs = std::filesystem;
  const std::string out_dir = ovr.out_dir.value_or(cfg.output.dir);
  fs::create_directories(out_dir);
  const prepared_data data = load_and_split(cfg);
  const double alpha = resolve_alpha_trunc(cfg, data.train.n());
  const variance_reg_problem prob(data.train, cfg.lambda, cfg.loss,
                                  cfg.loss == loss_kind::truncated_logistic
                                      ? alpha
                                      : 0.0);
  const solver_entry &entry = cfg.solvers.front();
  warn_if_lambda_ignored(cfg, entry);
  const std::uint64_t seed = ovr.seed.value_or(cfg.seed);
  const long log_every = ovr.log_every.value_or(cfg.logging.interval);
  const bool dense = ovr.dense_trace.value_or(cfg.logging.dense_trace);

  const std::string trace_path = out_dir + "/" + cfg.output.trace;
  std::ofstream trace_out(trace_path);
  if (!trace_out) throw error("cannot open trace file '" + trace_path + "'");
  run_sink sink(prob, data.train, data.test, trace_out, entry.label,
                trace_clock::work);

  json summary;
  summary["schema"] = "infproj-summary-v1";
  summary["solver"] = entry.name;
  summary["label"] = entry.label;
  summary["dataset"] = dataset_summary(cfg, data);
  summary["seed"] = seed;
  summary["lambda"] = cfg.lambda;
  if (cfg.loss == loss_kind::truncated_logistic)
    summary["alpha_trunc"] = alpha;
  summary["config"] = config_echo;

  const auto wall0 = std::chrono::steady_clock::now();
  int exit_code = 0;
  std::vector<stage_snapshot> snaps;
  dvec final_x;
  try {
    const double cpu0 = process_cpu_seconds();
    solver_outcome out = dispatch_solver(
        entry, prob, log_every, seed, sink, dense ? &snaps : nullptr, dense);
    summary["solver_detail"] = out.detail;
    summary["final"] = final_metrics(prob, data, out.final_x);
    summary["timing"] = {
        {"cpu_seconds", process_cpu_seconds() - cpu0},
        {"solve_seconds", out.solve_seconds},
        {"wall_seconds",
         seconds_of(std::chrono::steady_clock::now() - wall0)},
        {"work_units", out.work_units}};
    summary["status"] = "ok";
    final_x = std::move(out.final_x);
  } catch (const std::exception &ex) {
    summary["status"] = std::string("error: ") + ex.what();
    exit_code = 3;  // divergence or solver failure; partial trace kept
  }
  summary["trace_rows"] = sink.rows();

  if (!final_x.empty()) {
    // final model, one "index value" pair per line
    std::ofstream model_out(out_dir + "/model.txt");
    char buf[64];
    for (std::size_t j = 0; j < final_x.size(); ++j) {
      if (final_x[j] == 0.0) continue;
      std::snprintf(buf, sizeof(buf), "%zu %.17g\n", j, final_x[j]);
      model_out << buf;
    }
  }

  // --dense-trace for st_spg: per-stage inner iterates for rate studies
  if (dense && entry.name == "st_spg" && !snaps.empty()) {
    std::ofstream inner_out(out_dir + "/trace_inner.csv");
    inner_out << "stage,inner_t,objective_F,grad_norm\n";
    char buf[128];
    dvec g;
    for (const stage_snapshot &s : snaps) {
      for (std::size_t t = 0; t < s.inner_x.size(); ++t) {
        prob.full_gradient_F(s.inner_x[t], g);
        std::snprintf(buf, sizeof(buf), "%ld,%zu,%.17g,%.17g\n", s.k, t + 1,
                      prob.eval_F(s.inner_x[t]), norm(g));
        inner_out << buf;
      }
    }
  }

  const std::string summary_path = out_dir + "/" + cfg.output.summary;
  std::ofstream summary_out(summary_path);
  summary_out << summary.dump(2) << "\n";
  return exit_code;
}

// `bench`: several solver entries against the same data/split/seed; real
// CPU-time traces, a combined long-format curve CSV and an SVG chart.
// Entries run sequentially by default (clean CPU-time attribution); the
// parallel mode trades that attribution for wall-clock speed.
inline int cmd_bench(const run_config &cfg, const run_overrides &ovr,
                     const json &config_echo, bool parallel = false) {
  namespace fs = std::filesystem;
  const std::string out_dir = ovr.out_dir.value_or(cfg.output.dir);
  fs::create_directories(out_dir);
  const prepared_data data = load_and_split(cfg);
  const double alpha = resolve_alpha_trunc(cfg, data.train.n());
  const variance_reg_problem prob(data.train, cfg.lambda, cfg.loss,
                                  cfg.loss == loss_kind::truncated_logistic
                                      ? alpha
                                      : 0.0);
  const std::uint64_t seed = ovr.seed.value_or(cfg.seed);
  const long log_every = ovr.log_every.value_or(cfg.logging.interval);

  json bench_summary;
  bench_summary["schema"] = "infproj-bench-v1";
  bench_summary["dataset"] = dataset_summary(cfg, data);
  bench_summary["seed"] = seed;
  bench_summary["parallel"] = parallel;
  bench_summary["config"] = config_echo;

  const std::size_t count = cfg.solvers.size();
  std::vector<json> per_solver(count);
  std::vector<std::string> trace_paths(count);

  auto run_entry = [&](std::size_t si) {
    const solver_entry &entry = cfg.solvers[si];
    warn_if_lambda_ignored(cfg, entry);
    trace_paths[si] = out_dir + "/trace_" + std::to_string(si) + ".csv";
    std::ofstream trace_out(trace_paths[si]);
    run_sink sink(prob, data.train, data.test, trace_out, entry.label,
                  trace_clock::cpu);
    json rec;
    rec["name"] = entry.name;
    rec["label"] = entry.label;
    rec["trace"] = trace_paths[si];
    try {
      const solver_outcome out =
          dispatch_solver(entry, prob, log_every, seed, sink, nullptr);
      rec["detail"] = out.detail;
      rec["final"] = final_metrics(prob, data, out.final_x);
      rec["solve_seconds"] = out.solve_seconds;
      rec["work_units"] = out.work_units;
      rec["iterations"] = out.iterations;
      rec["per_iteration_seconds"] =
          out.solve_seconds / std::max<long>(1, out.iterations);
      rec["status"] = "ok";
    } catch (const std::exception &ex) {
      rec["status"] = std::string("error: ") + ex.what();
    }
    per_solver[si] = std::move(rec);
  };

  if (parallel && count > 1) {
    std::vector<std::thread> pool;
    const unsigned workers =
        std::min<unsigned>(max_threads(), static_cast<unsigned>(count));
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t si = w; si < count; si += workers) run_entry(si);
      });
    for (std::thread &t : pool) t.join();
  } else {
    for (std::size_t si = 0; si < count; ++si) run_entry(si);
  }

  std::string curves =
      "label,stage_or_iter,cpu_seconds,iter_cpu_seconds,objective_F,"
      "grad_norm,train_error,test_error\n";
  std::vector<chart_series> train_series, test_series;
  std::size_t ok_count = 0;
  for (std::size_t si = 0; si < count; ++si) {
    if (per_solver[si].value("status", "") == "ok") ++ok_count;
    std::ifstream in(trace_paths[si]);
    if (!in) continue;
    try {
      const trace_data td = read_trace_csv(in);
      chart_series tr, te;
      tr.label = te.label = cfg.solvers[si].label;
      double prev_cpu = 0.0;
      long prev_iter = 0;
      char buf[256];
      for (const trace_record &r : td.rows) {
        const double diter = static_cast<double>(
            std::max<long>(1, r.stage_or_iter - prev_iter));
        std::snprintf(buf, sizeof(buf),
                      "%s,%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      r.solver.c_str(), r.stage_or_iter, r.cpu_seconds,
                      (r.cpu_seconds - prev_cpu) / diter, r.objective_F,
                      r.grad_norm, r.train_error, r.test_error);
        curves += buf;
        prev_cpu = r.cpu_seconds;
        prev_iter = r.stage_or_iter;
        tr.x.push_back(r.cpu_seconds);
        tr.y.push_back(r.train_error);
        te.x.push_back(r.cpu_seconds);
        te.y.push_back(r.test_error);
      }
      train_series.push_back(std::move(tr));
      test_series.push_back(std::move(te));
    } catch (const std::exception &) {
      // failed runs may leave empty traces; the summary carries the error
    }
  }

  {
    std::ofstream curves_out(out_dir + "/bench.csv");
    curves_out << curves;
  }
  {
    std::ofstream chart_out(out_dir + "/" + cfg.output.chart);
    chart_out << render_error_chart(train_series, test_series,
                                    "error vs cpu time", cfg.log_x);
  }
  bench_summary["solvers"] = json(per_solver);
  bench_summary["partial_failures"] = ok_count != count;
  {
    std::ofstream summary_out(out_dir + "/" + cfg.output.summary);
    summary_out << bench_summary.dump(2) << "\n";
  }
  return ok_count > 0 ? 0 : 4;
}

}  // namespace infproj

#endif
