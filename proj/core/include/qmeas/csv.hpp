#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

namespace qmeas {

/// Shortest round-trip decimal form, locale-independent ('.' decimal point).
std::string format_number(double value);

/// True only if the whole string (surrounding blanks allowed) is a number.
bool parse_number(std::string_view text, double& out);

}  // namespace qmeas
