#include <string>
#include <vector>

#include "graphsos/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return graphsos::cli::run(args);
}
