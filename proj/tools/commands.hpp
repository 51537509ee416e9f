#pragma once

#include <string>

#include "hybridplan/oracle.hpp"
#include "hybridplan/sim_fpq.hpp"

namespace hpcli {

enum class Model { kNodeTrix, kPolyLink, kClique };

struct TestArgs {
  Model model = Model::kNodeTrix;
  std::string input;
  std::string witness;
  std::string svg;
  std::string format = "text";
  bool oracle = false;
  hybridplan::oracle::OracleBudget budget;
  hybridplan::sim::SolveOptions solve;
};

struct ConstrainedArgs {
  std::string input;
  std::string constraints;
  std::string witness;
  std::string format = "text";
  hybridplan::sim::SolveOptions solve;
};

struct FuzzArgs {
  Model model = Model::kNodeTrix;
  unsigned long long seed = 1;
  int trials = 500;
  std::string out = "counterexample.json";
  std::string replay;
  std::string mutate;  // "rigid-coherence" swaps in a deliberately weaker test
  std::string format = "text";
  hybridplan::oracle::OracleBudget budget;
  hybridplan::oracle::FixtureShape shape;
};

struct BenchArgs {
  std::string family = "cycle-of-clusters";
  int min = 8;
  int max = 128;
  int repeat = 3;
  std::string format = "csv";
};

int run_test(const TestArgs& args);
int run_constrained(const ConstrainedArgs& args);
int run_fuzz(const FuzzArgs& args);
int run_bench(const BenchArgs& args);

}  // namespace hpcli
