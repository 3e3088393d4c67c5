#include <iostream>

#include "chmr/cli/cli.hpp"

int main(int argc, char** argv) { return chmr::cli::run(argc, argv, std::cout, std::cerr); }
