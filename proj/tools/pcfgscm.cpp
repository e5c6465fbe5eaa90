#include <iostream>
#include <string>
#include <vector>

#include "pcfgscm/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return pcfgscm::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cin, std::cout, std::cerr);
}
