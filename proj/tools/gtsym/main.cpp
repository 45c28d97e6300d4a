#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  return gtsym::run_cli(std::vector<std::string>(argv, argv + argc), std::cerr);
}
