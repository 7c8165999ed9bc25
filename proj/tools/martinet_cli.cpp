#include <iostream>
#include <string>
#include <vector>

#include "martinet/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return martinet::dispatch(args, std::cout, std::cerr);
}
