#include <iostream>

#include "bicoref/cli.h"

int main(int argc, char** argv) {
  return bicoref::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
