#include <iostream>

#include "tongue/cli.hpp"

int main(int argc, char** argv) { return tongue::run_cli(argc, argv, std::cout, std::cerr); }
