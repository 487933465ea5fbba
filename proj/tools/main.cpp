#include <iostream>

#include "pdmcausal/harness.hpp"

int main(int argc, char** argv) { return pdmcausal::cli_dispatch(argc, argv, std::cout, std::cerr); }
