#include <iostream>

#include "xlmap/cli.hpp"

int main(int argc, char** argv) { return xlmap::cli::run(argc, argv, std::cout, std::cerr); }
