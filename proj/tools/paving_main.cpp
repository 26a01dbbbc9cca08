#include <iostream>

#include "paving/cli/commands.hpp"

int main(int argc, char** argv) { return paving::cli::run_cli(argc, argv, std::cout, std::cerr); }
