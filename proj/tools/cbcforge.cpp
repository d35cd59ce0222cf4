#include <iostream>

#include "cbc/cli/app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cbc::run_cli(args, std::cout, std::cerr);
}
