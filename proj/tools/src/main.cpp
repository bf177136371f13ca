#include <iostream>
#include <string>
#include <vector>

#include "fdlab_cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fdlab::cli::run(args, std::cout, std::cerr);
}
