#include "lowrank/harness.hpp"

int main(int argc, char** argv) { return lowrank::cli_main(argc, argv); }
