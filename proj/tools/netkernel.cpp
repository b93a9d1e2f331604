#include <iostream>
#include <string>
#include <vector>

#include "netkernel/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return netkernel::cli::run(std::move(args), std::cout, std::cerr);
}
