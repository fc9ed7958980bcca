#include <iostream>
#include <string>
#include <vector>

#include "cfk/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cfk::run_cli(std::move(args), std::cin, std::cout, std::cerr);
}
