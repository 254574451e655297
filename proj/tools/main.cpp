#include "gammarod/cli.hpp"

int main(int argc, char** argv) { return gammarod::cli_main(argc, argv); }
