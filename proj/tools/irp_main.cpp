#include <iostream>
#include <string>
#include <vector>

#include "irp/cli.hpp"

int main(int argc, char** argv) {
  return irp::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
