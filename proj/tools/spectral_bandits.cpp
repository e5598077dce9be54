#include "specband/cli.hpp"

int main(int argc, char** argv) { return specband::cli_main(argc, argv); }
