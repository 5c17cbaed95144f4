#include "cli/commands.hpp"

int main(int argc, char** argv) { return arstat::cli::run(argc, argv); }
