#include <iostream>
#include <string>
#include <vector>

#include "stereogt/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return stereogt::run_cli(args, std::cout, std::cerr);
}
