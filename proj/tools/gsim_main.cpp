#include "gsim/cli.hpp"

int main(int argc, char** argv) {
  return gsim::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
