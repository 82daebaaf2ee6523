// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "trendvar/cli.hpp"

int main(int argc, char** argv) { return trendvar::run_cli(argc, argv, std::cout, std::cerr); }
