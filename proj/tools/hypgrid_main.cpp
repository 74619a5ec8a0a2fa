#include "hypgrid/cli.hpp"

int main(int argc, char** argv) { return hypgrid::run_cli(argc, argv); }
