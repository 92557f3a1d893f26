#pragma once

// Command-line front end: normalize, scan, resonances, verify.

#include <iosfwd>
#include <string>

namespace bnf {

// Exit codes.
constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitUncertified = 2;
constexpr int kExitFailure = 3;

// Runs one command; CSV and reports go to out, diagnostics to err.
int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Decimal rendering rounded in a chosen direction: the printed value is >= x
// (up) or <= x (down). sci uses `digits` significant digits, fixed uses
// `digits` decimals. Infinite values print as inf/-inf, NaN as NA.
std::string formatDirected(double x, bool up, int digits, bool sci);

}  // namespace bnf
