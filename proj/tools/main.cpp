#include "n2n/cli.hpp"

int main(int argc, char** argv) { return n2n::cli::run(argc, argv); }
