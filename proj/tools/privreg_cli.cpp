// Command-line entry point.
#include "privreg/cli.hpp"

int main(int argc, char** argv) { return privreg::cli_main(argc, argv); }
