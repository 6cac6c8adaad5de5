#include "treecast/cli.hpp"

int main(int argc, char** argv) { return treecast::cli::run(argc, argv); }
