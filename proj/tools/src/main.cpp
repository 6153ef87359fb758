#include <iostream>

#include "ckin_cli/cli.hpp"

int main(int argc, char** argv) { return ckin::cli::run(argc, argv, std::cout, std::cerr); }
