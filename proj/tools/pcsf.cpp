#include <iostream>

#include "pcsf/cli.hpp"

int main(int argc, char** argv) { return pcsf::cli::run(argc, argv, std::cout, std::cerr); }
