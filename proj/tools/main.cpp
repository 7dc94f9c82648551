#include "curv/cli.hpp"

int main(int argc, char** argv) { return curv::cli::run(argc, argv); }
