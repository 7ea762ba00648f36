#ifndef INFPROJ_OBSERVER_HPP
#define INFPROJ_OBSERVER_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

namespace infproj {

struct log_event {
  long step = 0;
  const dvec *x = nullptr;
  const dvec *y = nullptr;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double grad_norm = std::numeric_limits<double>::quiet_NaN();
  // Deterministic work clock at this event: per-sample oracle evaluations
  // so far, converted at 5e-8 s/unit.
  double work_seconds = std::numeric_limits<double>::quiet_NaN();
  // objective/grad_norm already are F(x) and ||grad F(x)||
  bool canonical = false;
  std::vector<std::pair<std::string, double>> extras;
};

class solver_observer {
 public:
  virtual ~solver_observer() = default;
  virtual void log(const log_event &) = 0;
};

constexpr double work_unit_seconds = 5e-8;

}  // namespace infproj

#endif
