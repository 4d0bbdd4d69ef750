// Prints one PASS/FAIL line per acceptance criterion; exits nonzero on any failure.

#include <ainf/verify_suite.hpp>

#include <iostream>

int main() {
  int failed = 0;
  for (const auto& r : ainf::verify_suite()) {
    std::cout << ainf::format_criterion(r) << std::endl;
    failed += !r.passed;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
  return failed ? 1 : 0;
}
