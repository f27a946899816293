#include <iostream>

#include "gconvex/cli.hpp"

int main(int argc, char** argv) { return gcx::cli::run(argc, argv, std::cout, std::cerr); }
