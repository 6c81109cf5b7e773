#include <iostream>

#include "npp3cli/cli.hpp"

int main(int argc, char** argv) {
  return npp3::cli::run(argc, argv, std::cout, std::cerr);
}
