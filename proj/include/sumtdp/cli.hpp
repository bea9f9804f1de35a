#pragma once

#include <iosfwd>

namespace sumtdp {

/// Entry point of the `sumtdp` tool. Returns 0 on success, 1 on internal
/// errors and 2 on usage or input errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sumtdp
