#include <iostream>
#include <string>
#include <vector>

#include "qspeckle/io.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return qspeckle::run_cli(args, std::cout, std::cerr);
}
