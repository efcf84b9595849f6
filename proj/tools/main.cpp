#include "cli.hpp"

int main(int argc, char** argv) { return plhom::cli::run(argc, argv); }
