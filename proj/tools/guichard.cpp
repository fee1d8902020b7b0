#include "guichard/cli.hpp"

int main(int argc, char** argv) { return guichard::cli::run(argc, argv); }
