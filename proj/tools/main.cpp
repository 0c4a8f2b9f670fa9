#include <iostream>

#include "vnagen/cli.hpp"

int main(int argc, char** argv) { return vnagen::cli::run(argc, argv, std::cout, std::cerr); }
