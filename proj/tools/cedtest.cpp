#include "cedtest/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return cedtest::cli::run(argc, argv, std::cout, std::cerr); }
