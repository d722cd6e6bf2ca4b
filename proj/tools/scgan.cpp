#include "scgan/cli.hpp"

int main(int argc, char** argv) { return scgan::cli_main(argc, argv); }
