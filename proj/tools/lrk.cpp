#include "lrk/cli.hpp"

int main(int argc, char** argv) { return lrk::cli::run(argc, argv); }
