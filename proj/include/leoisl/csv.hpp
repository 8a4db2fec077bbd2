#pragma once

#include <initializer_list>
#include <string>
#include <string_view>

namespace leoisl::csv {

/// Quotes a field when it contains a delimiter, quote or newline.
std::string field(std::string_view text);

/// Shortest round-trip decimal representation.
std::string number(double value);

/// Joins already-formatted fields with commas and appends a newline.
std::string row(std::initializer_list<std::string> fields);

}  // namespace leoisl::csv
