// Copyright 2026 The nvtwin Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nvtwin::csv {

using Row = std::vector<std::string>;

/// RFC 4180 style: quoted fields, doubled quotes, CRLF or LF line ends.
/// Throws ConfigError on an unterminated quote.
std::vector<Row> parse(std::string_view text);

std::string escape(std::string_view field);
void write_row(std::ostream& os, const Row& row);

/// Shortest "%.10g"-style rendering used for every numeric CSV cell.
std::string format_number(double value);
std::string format_optional(const std::optional<double>& value);

std::string_view trim(std::string_view s) noexcept;

}  // namespace nvtwin::csv
