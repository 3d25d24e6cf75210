#include <iostream>

#include "expgap/commands.hpp"

int main(int argc, char** argv) { return expgap::run_cli(argc, argv, std::cout, std::cerr); }
