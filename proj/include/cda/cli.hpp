#pragma once

namespace cda {

// Entry point behind the cda binary; also callable in-process from tests.
// Exit codes: 0 match/success, 1 mismatch, 2 input or format error,
// 3 internal invariant failure.
int cli_main(int argc, const char* const* argv);

}  // namespace cda
