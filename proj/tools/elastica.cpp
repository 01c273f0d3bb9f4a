#include "elastica/cli.hpp"

int main(int argc, char** argv) { return elastica::run_cli(argc, argv); }
