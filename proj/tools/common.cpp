#include "common.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hpcli {

using hybridplan::Error;
using hybridplan::ErrorCode;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParseError:
    case ErrorCode::kMissingSideAnnotation:
    case ErrorCode::kInvalidSideStructure:
    case ErrorCode::kInvalidConstraint:
    case ErrorCode::kLeafNotPresent:
    case ErrorCode::kLeafSetMismatch:
    case ErrorCode::kMismatchedRotation:
      return kInputError;
    case ErrorCode::kFrameNotBiconnected:
    case ErrorCode::kNotBiconnected:
    case ErrorCode::kNotAClique:
    case ErrorCode::kBudgetExceeded:
    case ErrorCode::kTooLarge:
      return kPrecondition;
    default:
      return kInternal;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParseError, "cannot read " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kParseError, "cannot write " + path);
  out << text;
}

std::string RunReport::render(const std::string& format) const {
  if (format == "json") {
    nlohmann::ordered_json j;
    j["verdict"] = verdict;
    nlohmann::ordered_json t = nlohmann::ordered_json::object();
    for (const auto& [stage, ms] : timings_ms) t[stage] = std::round(ms * 1000) / 1000;
    j["timings_ms"] = t;
    j["stats"] = stats;
    j["seed"] = seed;
    if (!message.empty()) j["message"] = message;
    return j.dump(2) + "\n";
  }
  std::ostringstream out;
  out << "verdict: " << verdict << "\n";
  if (!message.empty()) out << "message: " << message << "\n";
  for (const auto& [k, v] : stats) out << k << ": " << v << "\n";
  for (const auto& [stage, ms] : timings_ms) out << "time." << stage << ": " << ms << " ms\n";
  return out.str();
}

double loglog_slope(const std::vector<std::pair<double, double>>& points) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(points.size());
  for (const auto& [x, y] : points) {
    const double lx = std::log(x);
    const double ly = std::log(std::max(y, 1e-9));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  return den == 0 ? 0 : (n * sxy - sx * sy) / den;
}

void init_logging() {
  auto logger = spdlog::stderr_color_mt("hybridplan");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  const char* level = std::getenv("HYBRIDPLAN_LOG");
  spdlog::set_level(level ? spdlog::level::from_str(level) : spdlog::level::warn);
}

}  // namespace hpcli
