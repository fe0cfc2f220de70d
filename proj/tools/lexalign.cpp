#include <string>
#include <vector>

#include "lexalign/cli.hpp"

int main(int argc, char** argv) {
  return lexalign::run_cli(std::vector<std::string>(argv, argv + argc));
}
