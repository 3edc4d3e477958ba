#pragma once

#include <iosfwd>

namespace thermoecon::cli {

/// Runs one subcommand. Returns 0 on success, 1 on a domain error, 2 on a
/// usage or parse error. Results go to `out`; diagnostics (one
/// "ERR_<CODE>: message" line) go to `err`; `in` backs `--data -`.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace thermoecon::cli
