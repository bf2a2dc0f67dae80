#include "scriptorium/commands.hpp"

int main(int argc, char** argv) { return scriptorium::cli::run_cli(argc, argv); }
