#include <iostream>

#include "scenegen/cli.hpp"

int main(int argc, char** argv) { return scenegen::run_cli(argc, argv, std::cout, std::cerr); }
