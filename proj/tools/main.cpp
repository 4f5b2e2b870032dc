#include "cli.hpp"

int main(int argc, char** argv) { return liq::cli::run(argc, argv); }
