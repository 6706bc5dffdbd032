#include "mpstream/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return mpstream::cli::run(argc, argv, std::cout, std::cerr); }
