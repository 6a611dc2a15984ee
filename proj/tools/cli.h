#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace framecrf::tools {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // invalid data, I/O or numerical failure
inline constexpr int kExitUsage = 2;    // bad flags or configuration

// Environment variable naming the default model directory for train/predict.
inline constexpr const char* kModelDirEnv = "FRAMECRF_MODEL_DIR";

// args[0] is the program name. Machine output goes to `out`, diagnostics to
// `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace framecrf::tools
