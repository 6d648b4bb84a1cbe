#include <iostream>
#include <string>
#include <vector>

#include "dante/cli.hpp"

int main(int argc, char** argv) {
  return dante::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
