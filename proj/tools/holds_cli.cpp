#include <iostream>

#include "holds/cli.hpp"

int main(int argc, char** argv) { return holds::run_cli(argc, argv, std::cout, std::cerr); }
