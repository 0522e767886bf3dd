#include "aimrom/cli.hpp"

int main(int argc, char** argv) { return aimrom::cli::main(argc, argv); }
