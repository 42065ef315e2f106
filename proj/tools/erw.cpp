#include <iostream>
#include <string>
#include <vector>

#include "erw/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return erw::cli::run(args, std::cout, std::cerr);
}
