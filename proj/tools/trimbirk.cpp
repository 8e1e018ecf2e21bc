#include "trimbirk/cli.hpp"

int main(int argc, char** argv) { return trimbirk::cli::run_cli(argc, argv); }
