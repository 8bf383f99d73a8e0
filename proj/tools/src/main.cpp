#include "ivsel_cli/cli.hpp"

int main(int argc, char** argv) { return ivsel::cli::run_cli(argc, argv); }
