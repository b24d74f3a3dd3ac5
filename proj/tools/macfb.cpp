#include <iostream>

#include "macfb/cli.hpp"

int main(int argc, char** argv) { return macfb::cli::run_cli(argc, argv, std::cout, std::cerr); }
