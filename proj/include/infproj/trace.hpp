#ifndef INFPROJ_TRACE_HPP
#define INFPROJ_TRACE_HPP

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

namespace infproj {

inline constexpr const char *trace_schema_version = "infproj-trace-v1";

// One row per logging event; extras are flattened into stable extra columns.
struct trace_record {
  std::string solver;
  long stage_or_iter = 0;
  double cpu_seconds = 0.0;
  double objective_F = 0.0;
  double grad_norm = 0.0;
  double train_error = 0.0;
  double test_error = 0.0;
  std::vector<std::pair<std::string, double>> extras;
};

class trace_writer {
 public:
  trace_writer(std::ostream &out, std::vector<std::string> extra_keys)
      : out_(&out), extra_keys_(std::move(extra_keys)) {
    *out_ << "# " << trace_schema_version << "\n";
    *out_ << "solver,stage_or_iter,cpu_seconds,objective_F,grad_norm,"
             "train_error,test_error";
    for (const std::string &k : extra_keys_) *out_ << ',' << k;
    *out_ << "\n";
  }

  const std::vector<std::string> &extra_keys() const { return extra_keys_; }

  void write(const trace_record &r) {
    check_finite(r.cpu_seconds, "cpu_seconds");
    if (r.cpu_seconds < last_cpu_)
      throw invariant_error("trace: cpu_seconds decreased within a run");
    last_cpu_ = r.cpu_seconds;
    check_finite(r.objective_F, "objective_F");
    check_finite(r.grad_norm, "grad_norm");
    check_finite(r.train_error, "train_error");
    check_finite(r.test_error, "test_error");
    if (r.extras.size() != extra_keys_.size())
      throw error("trace: extra column count mismatch");
    char buf[32];
    *out_ << r.solver << ',' << r.stage_or_iter;
    for (double v : {r.cpu_seconds, r.objective_F, r.grad_norm, r.train_error,
                     r.test_error}) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      *out_ << ',' << buf;
    }
    for (std::size_t i = 0; i < r.extras.size(); ++i) {
      if (r.extras[i].first != extra_keys_[i])
        throw error("trace: extra key '" + r.extras[i].first +
                    "' does not match column '" + extra_keys_[i] + "'");
      check_finite(r.extras[i].second, r.extras[i].first.c_str());
      std::snprintf(buf, sizeof(buf), "%.17g", r.extras[i].second);
      *out_ << ',' << buf;
    }
    *out_ << '\n';
    out_->flush();  // keep partial traces on divergence
  }

 private:
  static void check_finite(double v, const char *what) {
    if (!std::isfinite(v))
      throw invariant_error(std::string("trace: non-finite ") + what);
  }

  std::ostream *out_;
  std::vector<std::string> extra_keys_;
  double last_cpu_ = -std::numeric_limits<double>::infinity();
};

struct trace_data {
  std::vector<trace_record> rows;
  std::vector<std::string> extra_keys;
};

inline trace_data read_trace_csv(std::istream &in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != std::string("# ") + trace_schema_version)
    throw error("trace: missing or unknown schema header");
  if (!std::getline(in, line)) throw error("trace: missing column header");
  std::vector<std::string> cols;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) cols.push_back(tok);
  }
  const std::vector<std::string> fixed = {
      "solver",     "stage_or_iter", "cpu_seconds", "objective_F",
      "grad_norm",  "train_error",   "test_error"};
  if (cols.size() < fixed.size())
    throw error("trace: too few columns");
  for (std::size_t i = 0; i < fixed.size(); ++i)
    if (cols[i] != fixed[i])
      throw error("trace: unexpected column '" + cols[i] + "'");
  trace_data data;
  data.extra_keys.assign(cols.begin() + fixed.size(), cols.end());

  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != cols.size())
      throw parse_error(line_no, "trace row has wrong field count");
    auto num = [&](const std::string &s) {
      double v = 0.0;
      const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw parse_error(line_no, "bad number '" + s + "'");
      return v;
    };
    trace_record r;
    r.solver = f[0];
    r.stage_or_iter = static_cast<long>(num(f[1]));
    r.cpu_seconds = num(f[2]);
    r.objective_F = num(f[3]);
    r.grad_norm = num(f[4]);
    r.train_error = num(f[5]);
    r.test_error = num(f[6]);
    for (std::size_t i = 0; i < data.extra_keys.size(); ++i)
      r.extras.emplace_back(data.extra_keys[i], num(f[7 + i]));
    data.rows.push_back(std::move(r));
  }
  return data;
}

inline trace_data read_trace_csv_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open trace file '" + path + "'");
  return read_trace_csv(in);
}

}  // namespace infproj

#endif
