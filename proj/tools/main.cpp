#include <iostream>

#include "an2c/cli.hpp"

int main(int argc, char** argv) {
  return an2c::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
