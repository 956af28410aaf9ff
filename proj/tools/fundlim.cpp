#include <iostream>

#include "fundlim/cli.hpp"

int main(int argc, char** argv) { return fundlim::cli::run(argc, argv, std::cout, std::cerr); }
