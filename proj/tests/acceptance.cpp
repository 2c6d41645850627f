// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments
// select criteria by number, e.g. `acceptance 3 7`.

#include <cstdlib>
#include <iostream>
#include <vector>

#include "lorentz/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const bool ok = lorentz::acceptance::run_all(std::cout, {}, only);
  std::cout << (ok ? "acceptance: all criteria passed" : "acceptance: some criteria failed") << std::endl;
  return ok ? 0 : 1;
}
