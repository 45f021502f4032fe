#include "lcid/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return lcid::run(argc, argv, std::cout, std::cerr); }
