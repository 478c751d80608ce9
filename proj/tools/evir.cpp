#include "evir/cli.hpp"

int main(int argc, char** argv) { return evir::cli_main(argc, argv); }
