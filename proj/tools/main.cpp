#include <iostream>

#include "tte/cli.hpp"

int main(int argc, char** argv) { return tte::cli::run(argc, argv, std::cout, std::cerr); }
