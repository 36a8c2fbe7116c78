#include <iostream>
#include <string>
#include <vector>

#include "sketch_sfa/cli/commands.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return sketch_sfa::cli::run_cli(args, std::cout, std::cerr);
}
