#pragma once

#include <iosfwd>

namespace hv3d {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitCompute = 4;

/// Entry point of the `hv3d` tool: subcommands score, baselines, calibrate, evaluate, distort.
/// Results go to files named by --out (or `out` when absent); diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hv3d
