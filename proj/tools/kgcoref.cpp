#include "kgcoref/cli.hpp"

int main(int argc, char** argv) { return kgcoref::cli::run(argc, argv); }
