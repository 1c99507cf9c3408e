#include <iostream>
#include <string>
#include <vector>

#include "printsig/cli.hpp"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv, argv + argc);
  return printsig::cli::run(args, std::cout, std::cerr);
}
