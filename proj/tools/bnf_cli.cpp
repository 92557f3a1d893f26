#include <iostream>

#include "bnf/cli.hpp"

int main(int argc, char** argv) { return bnf::runCli(argc, argv, std::cout, std::cerr); }
