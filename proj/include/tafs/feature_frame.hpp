#pragma once

#include "tafs/date.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace tafs {

struct FeatureColumn {
    std::string name;
    std::vector<double> values;
};

/// Dated matrix of named indicator values. Missing entries are NaN.
///
/// Column names follow `<group>` for single-output indicators and
/// `<group>:<output>` for multi-output ones, so the indicator a column
/// belongs to can always be recovered from the name alone.
struct FeatureFrame {
    std::vector<Date> dates;
    std::vector<FeatureColumn> columns;

    std::size_t rows() const { return dates.size(); }
    std::size_t cols() const { return columns.size(); }

    /// Index of the column called `name`, or cols() when absent.
    std::size_t find(std::string_view name) const;

    /// Throws SchemaError on duplicate names or misaligned column lengths.
    void validate() const;

    /// Rows [first, last) as a new frame.
    FeatureFrame slice(std::size_t first, std::size_t last) const;
};

/// Indicator group a column or windowed feature belongs to:
/// strips a trailing `@lag` and then any `:output` suffix.
std::string group_of(std::string_view column_name);

/// CSV with `Date` as first column. Missing values are written as blank cells.
void write_frame_csv(const FeatureFrame& frame, std::ostream& out);
void write_frame_csv(const FeatureFrame& frame, const std::string& path);
FeatureFrame read_frame_csv(std::istream& in);
FeatureFrame read_frame_csv(const std::string& path);

/// Shortest round-trippable text for a double ("" for NaN).
std::string format_number(double v);

}  // namespace tafs
