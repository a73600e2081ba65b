#include "cli.hpp"

int main(int argc, char** argv) {
  return geomflow::cli::main(std::vector<std::string>(argv, argv + argc));
}
