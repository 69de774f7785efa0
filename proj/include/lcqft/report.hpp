#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include <json.hpp>

namespace lcqft {

using Json = nlohmann::ordered_json;

/// Outcome of one sampled property check.
struct Report {
  std::string check_id;
  Json params = Json::object();
  std::size_t n_samples = 0;
  double max_deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;

  void observe(double deviation) {
    ++n_samples;
    if (std::isnan(deviation)) deviation = std::numeric_limits<double>::infinity();
    max_deviation = std::max(max_deviation, deviation);
  }

  /// pass iff max_deviation <= tolerance.
  Report& finish() {
    pass = max_deviation <= tolerance;
    return *this;
  }
};

inline Report make_report(std::string id, double tolerance, Json params = Json::object()) {
  Report r;
  r.check_id = std::move(id);
  r.tolerance = tolerance;
  r.params = std::move(params);
  return r;
}

}  // namespace lcqft
