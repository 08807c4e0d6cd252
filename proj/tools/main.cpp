#include <iostream>

#include "qvol/cli.hpp"

int main(int argc, char** argv) { return qvol::cli::run(argc, argv, std::cout, std::cerr); }
