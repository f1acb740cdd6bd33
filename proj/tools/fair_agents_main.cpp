#include <iostream>

#include "fair_agents/cli/app.hpp"

int main(int argc, char** argv) {
  return fair_agents::run_cli(argc, argv, std::cout, std::cerr);
}
