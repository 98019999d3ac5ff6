#include <iostream>

#include "polyseq/commands.hpp"

int main(int argc, char** argv) { return polyseq::cli::run_cli(argc, argv, std::cout, std::cerr); }
