//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <iostream>
#include <string>
#include <vector>

#include "potacc/cli.hpp"

int main(int argc, char** argv) {
  return potacc::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
