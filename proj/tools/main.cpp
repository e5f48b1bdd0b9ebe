#include <iostream>
#include <string>
#include <vector>

#include "exdec/surface.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return exdec::run_cli(args, std::cout, std::cerr);
}
