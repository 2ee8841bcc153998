#include "airyedge/cli.hpp"

int main(int argc, char** argv) { return airyedge::cli::run(argc, argv); }
