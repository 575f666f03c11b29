#include "deltaring/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return deltaring::cli::run(argc, argv, std::cout, std::cerr);
}
