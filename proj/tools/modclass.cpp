#include <iostream>
#include <string>
#include <vector>

#include "modclass/cli.hpp"

int main(int argc, char** argv) {
  return modclass::dispatch(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
