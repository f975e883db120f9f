#include "tensorspec/cli.hpp"

int main(int argc, char** argv) { return tensorspec::cli::run(argc, argv); }
