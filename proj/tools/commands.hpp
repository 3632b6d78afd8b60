#pragma once

namespace fsel::cli {

/// Entry point of the `fsel` binary. Returns the process exit code:
/// 0 success, 1 usage or config error, 2 data error, 3 numerical failure.
int run(int argc, char** argv);

}  // namespace fsel::cli
