#include "corenet/cli.hpp"

int main(int argc, char** argv) { return corenet::cli::run(argc, argv); }
