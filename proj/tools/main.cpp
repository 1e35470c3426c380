#include "cda/cli.hpp"

int main(int argc, char** argv) { return cda::cli_main(argc, argv); }
