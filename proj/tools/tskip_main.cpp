#include "tskip/cli.hpp"

int main(int argc, char** argv) { return tskip::cli::run(argc, argv); }
