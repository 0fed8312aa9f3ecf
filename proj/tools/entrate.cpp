#include <iostream>

#include "entrate/cli/commands.hpp"

int main(int argc, char** argv) { return entrate::cli::run_cli(argc, argv, std::cout, std::cerr); }
