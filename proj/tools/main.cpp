#include "cli.hpp"

int main(int argc, char** argv) { return wassfem::cli_main(argc, argv); }
