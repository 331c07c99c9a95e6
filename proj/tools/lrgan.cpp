#include <iostream>
#include <string>
#include <vector>

#include "lrgan/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return lrgan::run_cli(args, std::cout, std::cerr);
}
