#include <iostream>

#include "tlsdd_cli/commands.hpp"

int main(int argc, char** argv) { return tlsdd::cli::main_entry(argc, argv, std::cout, std::cerr); }
