#include "chimera/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return chimera::run_cli(argc, argv, std::cout, std::cerr); }
