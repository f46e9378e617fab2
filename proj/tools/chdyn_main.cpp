#include <iostream>

#include "chdyn/cli.hpp"

int main(int argc, char **argv) {
  return chdyn::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
