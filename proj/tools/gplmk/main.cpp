#include "gplmk/cli.hpp"

int main(int argc, char** argv) { return gplmk::cli::run(argc, argv); }
