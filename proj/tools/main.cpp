#include "cli.hpp"

int main(int argc, char** argv) { return thermo::cli::run(argc, argv); }
