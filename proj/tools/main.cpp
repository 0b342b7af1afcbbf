#include <string>
#include <vector>

#include "pnpmri/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return pnpmri::run_cli(args);
}
