#include <iostream>

#include "imbal/cli.hpp"

int main(int argc, char** argv) { return imbal::run_cli(argc, argv, std::cout, std::cerr); }
