#include <iostream>

#include "cspnn/cli.hpp"

int main(int argc, char** argv) { return cspnn::cli::run(argc, argv, std::cout, std::cerr); }
