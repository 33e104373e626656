#include <iostream>

#include "chaosbound/cli.hpp"

int main(int argc, char** argv) { return chaosbound::cli_main(argc, argv, std::cout, std::cerr); }
