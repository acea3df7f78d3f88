// SPDX-License-Identifier: Apache-2.0

#include "chaoscs/harness.hpp"

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return chaoscs::harness::run_command(args, std::cout, std::cerr);
}
