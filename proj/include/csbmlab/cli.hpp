#pragma once

namespace csbmlab {

/// Entry point behind the csbm_lab binary; exposed so tests can drive it.
/// Returns 0 on success, 1 on usage/configuration errors, 2 on I/O errors.
int cli_main(int argc, const char* const* argv);

}  // namespace csbmlab
