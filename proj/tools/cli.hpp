#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lubrex::cli {

// Exit codes: 0 ok, 2 usage, 3 domain error, 4 validation failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitValidation = 4;

/// Runs one `lubrex <subcommand> ...` invocation. Streams are injectable for
/// tests; the real main passes std::cout/std::cerr.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lubrex::cli
