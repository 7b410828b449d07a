#include <iostream>

#include "hv3d/cli.hpp"

int main(int argc, char** argv) { return hv3d::run_cli(argc, argv, std::cout, std::cerr); }
