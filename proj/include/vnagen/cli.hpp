#pragma once
#include <iosfwd>

namespace vnagen::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kNegative = 1;      // does not generate / not separating / campaign failures
inline constexpr int kSchema = 2;        // bad document or usage
inline constexpr int kInvariant = 3;     // input breaks a library invariant
inline constexpr int kDisagreement = 4;  // criterion and oracle disagree
inline constexpr int kNotNormal = 5;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace vnagen::cli
