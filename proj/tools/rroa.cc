#include <iostream>

#include "rroa/cli/commands.h"

int main(int argc, char** argv) {
  return rroa::cli::Run(std::vector<std::string>(argv + 1, argv + argc), std::cout,
                        std::cerr);
}
