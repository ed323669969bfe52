#include <iostream>

#include "tarepair/cli.hpp"

int main(int argc, char** argv) {
  return tarepair::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
