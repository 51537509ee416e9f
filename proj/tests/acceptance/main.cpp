#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <vector>

#include "acceptance.hpp"

using namespace acceptance;

namespace {

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

// Usage: acceptance [criterion ids...]; runs all criteria by default.
int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "fpq-tree semantics", fpq_semantics},
      {2, "embedding dag bijection", embedding_bijection},
      {3, "normalization keeps fixedness", normalization_fixedness},
      {4, "join of 1-fixed instances is 2-fixed", join_fixedness},
      {5, "fixedness definitions agree", fixedness_definitions},
      {6, "solver matches exhaustive search", solver_agreement},
      {7, "rci nodetrix matches oracle", rci_differential},
      {8, "polylink and clique match oracle", polylink_differential},
      {9, "cycle-of-clusters scaling", cycle_scaling},
      {10, "independent rows and columns instance", distinguishing_instance},
  };
  std::vector<bool> wanted(criteria.size() + 1, argc == 1);
  for (int i = 1; i < argc; ++i) {
    const int id = std::atoi(argv[i]);
    if (id >= 1 && id <= static_cast<int>(criteria.size())) wanted[id] = true;
  }

  int failures = 0;
  for (const auto& c : criteria) {
    if (!wanted[c.id]) continue;
    Timer t;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %-40s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                t.seconds());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
