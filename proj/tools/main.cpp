#include <vector>

#include "plainwalk/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return plainwalk::run_cli(args);
}
