#include <iostream>

#include "dmmv_cli.hpp"

int main(int argc, char** argv) {
  return dmmv::cli::run(argc, argv, dmmv::cli::Streams{std::cin, std::cout, std::cerr});
}
