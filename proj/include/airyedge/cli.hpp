#pragma once

namespace airyedge::cli {

// Entry point behind the binary: parses argv, runs one subcommand, writes
// artifacts and manifests. Returns the process exit code: 0 on success with
// all verdicts passing, 1 on numeric/runtime failure or failing verdicts,
// 2 on usage errors.
int run(int argc, const char* const* argv);

}  // namespace airyedge::cli
