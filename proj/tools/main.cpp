#include <iostream>

#include "simcmp/cli.hpp"

int main(int argc, char** argv) { return simcmp::cli::run(argc, argv, std::cout, std::cerr); }
