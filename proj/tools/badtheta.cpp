#include <iostream>

#include "badtheta/cli.hpp"

int main(int argc, char** argv) { return badtheta::run_cli(argc, argv, std::cout, std::cerr); }
