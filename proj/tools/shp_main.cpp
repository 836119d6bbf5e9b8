#include "shp/cli.hpp"

#include <iostream>

int main(int argc, char **argv) { return shp::run_cli(argc, argv, std::cout, std::cerr); }
