#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace tafs {

using Date = std::chrono::year_month_day;

/// Parses a strict `YYYY-MM-DD` calendar date. Returns nullopt on any
/// malformed or non-existent date (e.g. 2021-02-30).
std::optional<Date> parse_date(std::string_view text);

std::string format_date(const Date& date);

/// Date `days` calendar days after `date` (may be negative).
Date add_days(const Date& date, int days);

}  // namespace tafs
