#include <string>
#include <vector>

#include "symprox/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return symprox::run_cli(args);
}
