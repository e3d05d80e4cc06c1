#pragma once

namespace radcav::cli {

// Full command-line entry point; returns the process exit code
// (0 ok, 1 solver failure, 2 config error).
int run_cli(int argc, const char* const* argv);

}  // namespace radcav::cli
