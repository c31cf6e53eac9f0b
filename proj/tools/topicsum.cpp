// Copyright 2026 The topicsum Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <string>
#include <vector>

#include "topicsum/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return topicsum::cli::run(args, std::cout, std::cerr);
}
