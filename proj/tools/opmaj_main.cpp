#include <iostream>
#include <string>
#include <vector>

#include "opmaj/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return opmaj::run_cli(args, std::cout, std::cerr);
}
