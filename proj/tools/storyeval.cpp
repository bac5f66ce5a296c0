#include <iostream>
#include <string>
#include <vector>

#include "storyeval/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return storyeval::run(args, std::cout, std::cerr);
}
