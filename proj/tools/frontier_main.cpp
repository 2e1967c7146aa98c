#include <string>
#include <vector>

#include "fkde/cli.hpp"

int main(int argc, char** argv) {
  return fkde::cli::main_entry(std::vector<std::string>(argv + 1, argv + argc));
}
