#include <iostream>

#include "jetcalc/cli.hpp"

int main(int argc, char** argv) { return jetcalc::cli::run(argc, argv, std::cout, std::cerr); }
