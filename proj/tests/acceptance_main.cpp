// Prints one line per acceptance criterion; exits non-zero if any fails.

#include "charfol/acceptance.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv) {
  charfol::AcceptanceOptions opts;
  for (int i = 1; i < argc; ++i) opts.only.push_back(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& r : charfol::run_acceptance(opts)) {
    std::cout << charfol::format_result(r) << std::endl;
    failed += !r.pass;
  }
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << std::endl;
  return failed == 0 ? 0 : 1;
}
