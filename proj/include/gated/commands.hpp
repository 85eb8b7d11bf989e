#pragma once

#include <ostream>

#include "gated/config.hpp"

namespace gated {

/// Executes config.command. Returns the process exit status; diagnostics go
/// to `err`, reports to `out`. Errors in inputs yield a nonzero status
/// rather than an exception.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace gated
