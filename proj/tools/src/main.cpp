#include "fbindex/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return fbindex::cli::run(argc, argv, std::cout, std::cerr); }
