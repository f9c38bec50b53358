#include <iostream>
#include <string>
#include <vector>

#include "nfres/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return nfres::cli::run(args, std::cout, std::cerr);
}
