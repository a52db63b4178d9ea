#include "csbmlab/cli.hpp"

int main(int argc, char** argv) { return csbmlab::cli_main(argc, argv); }
