#include "pchan/cli.hpp"

int main(int argc, char** argv) { return pchan::cli::dispatch(argc, argv); }
