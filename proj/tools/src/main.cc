#include <iostream>

#include "echoforge_cli/cli.h"

int main(int argc, char** argv) { return echoforge::cli::Run(argc, argv, std::cout, std::cerr); }
