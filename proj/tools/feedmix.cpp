#include <iostream>
#include <string>
#include <vector>

#include "feedmix/commands.hpp"

int main(int argc, char* argv[]) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return feedmix::cli::run(args, std::cout, std::cerr);
}
