#include <iostream>

#include "ifock/cli.h"

int main(int argc, char** argv) { return ifock::cli::run(argc, argv, std::cout, std::cerr); }
