#pragma once

#include <chrono>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hybridplan/error.hpp"

namespace hpcli {

enum Exit : int { kPlanar = 0, kNotPlanar = 1, kInputError = 2, kPrecondition = 3, kInternal = 4 };

int exit_code_for(hybridplan::ErrorCode code);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

struct RunReport {
  std::string verdict;  // planar, not-planar or error
  std::vector<std::pair<std::string, double>> timings_ms;
  std::map<std::string, long long> stats;
  unsigned long long seed = 0;
  std::string message;

  std::string render(const std::string& format) const;
};

// Least-squares slope of log(y) over log(x).
double loglog_slope(const std::vector<std::pair<double, double>>& points);

void init_logging();

}  // namespace hpcli
