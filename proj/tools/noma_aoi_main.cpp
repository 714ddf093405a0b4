#include <iostream>
#include <string>
#include <vector>

#include "noma_aoi/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return noma_aoi::run_cli(args, std::cout, std::cerr);
}
