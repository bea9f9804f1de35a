#include <iostream>

#include "sumtdp/cli.hpp"

int main(int argc, char** argv) { return sumtdp::run_cli(argc, argv, std::cout, std::cerr); }
