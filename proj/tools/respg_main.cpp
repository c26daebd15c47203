#include <iostream>

#include "respg/cli.hpp"

int main(int argc, char** argv) { return respg::cli::run(argc, argv, std::cout, std::cerr); }
