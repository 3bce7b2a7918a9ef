#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gw/geometry.hpp"

namespace gw::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInvalidArguments = 2;
inline constexpr int kNumericalFailure = 3;

class ArgumentError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A frame vector named on the command line. Indices are 0-based here; the
// textual form is 1-based.
struct FrameToken {
    FrameKind kind;
    std::size_t i;
    std::size_t j;
};

// "e+", "e<i><j>", "f<i><j>", or "e<i>_<j>" / "f<i>_<j>" for multi-digit
// indices, with 1 <= i < j <= d.
FrameToken parse_frame_token(const std::string& text, std::size_t d);
// Two tokens separated by a comma.
std::pair<FrameToken, FrameToken> parse_pair_spec(const std::string& text, std::size_t d);
// Comma-separated positive reals.
std::vector<double> parse_lambda(const std::string& text);

// Runs one subcommand. args[0] is the program name. Writes a JSON
// CommandResult (or CSV) to `out` and human-readable diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gw::cli
