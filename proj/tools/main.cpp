#include <iostream>

#include "spinflip/cli.hpp"

int main(int argc, char** argv) { return spinflip::cli::run(argc, argv, std::cout, std::cerr); }
