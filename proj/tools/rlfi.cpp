#include <iostream>
#include <string>
#include <vector>

#include "rlfi/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return rlfi::run_cli(args, std::cout, std::cerr);
}
