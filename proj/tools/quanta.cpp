#include <iostream>

#include "quanta/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return quanta::run_command(args, std::cin, std::cout, std::cerr);
}
