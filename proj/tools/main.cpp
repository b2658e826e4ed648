#include <iostream>
#include <vector>

#include "byzrun/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return byzrun::run_cli(args, std::cout, std::cerr);
}
