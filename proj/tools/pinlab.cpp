#include "pinlab/cli.hpp"

int main(int argc, char** argv) { return pinlab::cli::run(argc, argv); }
