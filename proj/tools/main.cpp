#include "compreg/cli.hpp"

int main(int argc, char** argv) { return compreg::cli_run(argc, argv); }
