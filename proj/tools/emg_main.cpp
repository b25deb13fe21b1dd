#include <string>
#include <vector>

#include "emg/cli.hpp"

int main(int argc, char** argv) {
  return emg::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
