#include <iostream>

#include "homecore/cli.hpp"

int main(int argc, char** argv) {
  return homecore::cli::run(argc, argv, std::cin, std::cout, std::cerr);
}
