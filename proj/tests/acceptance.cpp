#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "deepdist/verify.hpp"

// Usage: acceptance [-v] [id ...]
int main(int argc, char** argv) {
  std::vector<int> ids;
  bool verbose = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "-v") {
      verbose = true;
    } else {
      ids.push_back(std::atoi(arg.c_str()));
    }
  }
  const auto results = deepdist::run_acceptance(ids, std::cout, verbose ? &std::cerr : nullptr);
  int failed = 0;
  for (const auto& r : results) failed += !r.pass;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
