#include "equilib/cli.hpp"

int main(int argc, char** argv) { return equilib::cli::run(argc, argv); }
