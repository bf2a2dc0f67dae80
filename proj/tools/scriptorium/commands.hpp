#pragma once

namespace scriptorium::cli {

/// Parses arguments and runs one subcommand. Returns the process exit code:
/// 0 success, 2 bad arguments, 3 I/O failure, 4 pipeline failure.
int run_cli(int argc, char** argv);

}  // namespace scriptorium::cli
