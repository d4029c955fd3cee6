#include <iostream>

#include "levyrep/cli.hpp"

int main(int argc, char** argv) { return levyrep::run_cli(argc, argv, std::cout, std::cerr); }
