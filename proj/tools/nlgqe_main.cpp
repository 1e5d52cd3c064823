#include <string>
#include <vector>

#include "nlgqe/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return nlgqe::run_cli(args);
}
