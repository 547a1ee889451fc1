#include <iostream>

#include "qoe/cli.hpp"

int main(int argc, char** argv) { return qoe::cli::run(argc, argv, std::cout, std::cerr); }
