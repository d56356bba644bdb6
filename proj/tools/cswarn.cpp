#include <iostream>

#include "cswarn/cli.hpp"

int main(int argc, char** argv) { return cswarn::run_cli(argc, argv, std::cout, std::cerr); }
