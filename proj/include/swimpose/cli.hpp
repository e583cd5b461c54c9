#pragma once

namespace swimpose {

/// Full command-line application: synth | train | eval | infer | plot.
/// Returns the process exit code: 0 success, 1 validation/usage error,
/// 2 unexpected runtime failure.
int run_cli(int argc, const char* const* argv);

}  // namespace swimpose
