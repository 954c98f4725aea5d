#include <string>
#include <vector>

#include "microrisk/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return microrisk::run_cli(std::move(args));
}
