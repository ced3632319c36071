#include <iostream>

#include "kmanifold/commands.hpp"

int main(int argc, char** argv) { return kmanifold::run_cli(argc, argv, std::cout, std::cerr); }
