#include "demograph/cli.hpp"

int main(int argc, char** argv) { return demograph::cli_run(argc, argv); }
