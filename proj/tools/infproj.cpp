#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "infproj/checks.hpp"
#include "infproj/runner.hpp"

namespace {

using namespace infproj;

json load_json(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::exception &e) {
    throw config_error(std::string("config: invalid JSON: ") + e.what());
  }
}

struct cli_overrides {
  std::string config_path;
  std::string out_dir;
  std::int64_t seed = -1;
  long log_every = 0;
  bool dense_trace = false;
  bool parallel = false;

  run_overrides to_overrides() const {
    run_overrides o;
    if (!out_dir.empty()) o.out_dir = out_dir;
    if (seed >= 0) o.seed = static_cast<std::uint64_t>(seed);
    if (log_every > 0) o.log_every = log_every;
    if (dense_trace) o.dense_trace = true;
    return o;
  }
};

int do_run(const cli_overrides &cli, bool bench) {
  const json doc = load_json(cli.config_path);
  const run_config cfg = parse_run_config(doc, bench);
  const run_overrides ovr = cli.to_overrides();
  return bench ? cmd_bench(cfg, ovr, doc, cli.parallel)
               : cmd_run(cfg, ovr, doc);
}

int do_check(const std::vector<std::string> &suites, std::uint64_t seed,
             bool csv) {
  const std::vector<check_result> results = run_check_suites(suites, seed);
  std::size_t failures = 0;
  kv_report rep;
  rep.title = "infproj check";
  for (const check_result &c : results) {
    const bool fail = !c.passed;
    failures += fail;
    std::printf("%s %s/%s: %s\n", fail ? "FAIL" : "PASS", c.suite.c_str(),
                c.name.c_str(), c.detail.c_str());
    rep.values.emplace_back(c.suite + "/" + c.name, c.passed ? 1.0 : 0.0);
  }
  std::printf("%zu/%zu checks passed\n", results.size() - failures,
              results.size());
  if (csv) std::fputs(rep.to_csv().c_str(), stdout);
  if (failures) {
    // machine-readable failure list
    for (const check_result &c : results)
      if (!c.passed)
        std::fprintf(stderr, "check-failure\t%s/%s\t%s\n", c.suite.c_str(),
                     c.name.c_str(), c.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}

int do_parse(const std::string &path, std::int64_t dim_override) {
  std::optional<index_t> dim;
  if (dim_override >= 0) dim = static_cast<index_t>(dim_override);
  const dataset d = parse_libsvm_file(path, dim);
  std::size_t pos = 0, nnz = 0, max_nnz = 0;
  std::size_t min_nnz = std::numeric_limits<std::size_t>::max();
  for (std::size_t i = 0; i < d.n(); ++i) {
    pos += d.label(i) > 0;
    nnz += d.row(i).nnz();
    max_nnz = std::max(max_nnz, d.row(i).nnz());
    min_nnz = std::min(min_nnz, d.row(i).nnz());
  }
  const std::size_t neg = d.n() - pos;
  std::printf("examples        %zu\n", d.n());
  std::printf("features        %u\n", d.dim());
  std::printf("pos:neg         %.4f:1\n",
              neg ? static_cast<double>(pos) / static_cast<double>(neg)
                  : static_cast<double>(pos));
  std::printf("nnz per row     min %zu  mean %.2f  max %zu\n", min_nnz,
              static_cast<double>(nnz) / static_cast<double>(d.n()), max_nnz);
  std::printf("max row norm    %.6g\n", std::sqrt(d.max_row_squared_norm()));
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"stochastic solvers for inf-projection minimization"};
  app.require_subcommand(1);

  cli_overrides run_cli, bench_cli;
  auto add_common = [](CLI::App *cmd, cli_overrides &o) {
    cmd->add_option("--config", o.config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", o.seed, "seed override");
    cmd->add_option("--log-every", o.log_every, "logging interval override");
    cmd->add_flag("--dense-trace", o.dense_trace,
                  "store per-iteration traces for rate studies");
  };
  CLI::App *run = app.add_subcommand("run", "run one solver on a dataset");
  add_common(run, run_cli);
  CLI::App *bench = app.add_subcommand(
      "bench", "run several solvers with a matched data/split/seed");
  add_common(bench, bench_cli);
  bench->add_flag("--parallel", bench_cli.parallel,
                  "run entries concurrently (disables CPU-time "
                  "comparability across solvers)");

  std::vector<std::string> suites = {"all"};
  std::int64_t check_seed = 0;
  bool check_csv = false;
  CLI::App *check =
      app.add_subcommand("check", "run the numeric diagnostics suites");
  check->add_option("--suite", suites,
                    "suites: gradients lemma1 projection invariants "
                    "selftest-fail (default: all)");
  check->add_option("--seed", check_seed, "seed for the sampled checks");
  check->add_flag("--csv", check_csv, "also emit the CSV report block");

  std::string parse_path;
  std::int64_t parse_dim = -1;
  CLI::App *parse =
      app.add_subcommand("parse", "libsvm sanity pass over one file");
  parse->add_option("file", parse_path, "libsvm text file")
      ->required()
      ->check(CLI::ExistingFile);
  parse->add_option("--dim", parse_dim, "feature dimension override");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(run_cli, false);
    if (bench->parsed()) return do_run(bench_cli, true);
    if (check->parsed())
      return do_check(suites, static_cast<std::uint64_t>(check_seed),
                      check_csv);
    if (parse->parsed()) return do_parse(parse_path, parse_dim);
  } catch (const parse_error &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const config_error &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const divergence_error &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
