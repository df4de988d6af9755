#include <iostream>

#include "piezo/cli.h"

int main(int argc, char** argv) { return piezo::run_cli(argc, argv, std::cout, std::cerr); }
