#include "permspec/cli.hpp"

int main(int argc, char** argv) { return permspec::cli_main(argc, argv); }
