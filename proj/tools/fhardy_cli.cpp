#include <iostream>

#include "fhardy/cli.hpp"

int main(int argc, char** argv) { return fhardy::cli::run(argc, argv, std::cout, std::cerr); }
