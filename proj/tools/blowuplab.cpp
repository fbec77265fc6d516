#include <iostream>

#include "blowup/commands.hpp"

int main(int argc, char** argv) {
  return blowup::run_cli(argc, argv, std::cout, std::cerr);
}
