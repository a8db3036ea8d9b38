#include "bvflow/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return bvflow::cli::run(argc, argv, std::cout, std::cerr); }
