#include <iostream>

#include "wsie/cli.hpp"

int main(int argc, char** argv) { return wsie::cli::main_entry(argc, argv, std::cout, std::cerr); }
