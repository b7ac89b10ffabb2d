#pragma once

namespace wassfem {

/// `wassfem solve|convergence|info --config PATH [--out DIR] [--deterministic]`.
/// Returns 0 on success, 1 on usage or config errors, 2 on numerical failure.
int cli_main(int argc, const char* const* argv);

}  // namespace wassfem
