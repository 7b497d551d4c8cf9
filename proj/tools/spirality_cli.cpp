#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include "spirality/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const bool color = ::isatty(STDOUT_FILENO) && std::getenv("SPIRALITY_NO_COLOR") == nullptr;
  return spirality::cli::run_cli(args, std::cout, std::cerr, color);
}
