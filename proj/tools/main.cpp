#include <iostream>

#include "growthlab/cli/commands.hpp"

int main(int argc, char** argv) { return growthlab::cli::run_cli(argc, argv, std::cout, std::cerr); }
