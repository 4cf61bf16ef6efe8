#include "tafs/feature_frame.hpp"

#include "common/text.hpp"
#include "tafs/error.hpp"
#include "tafs/linalg.hpp"

#include <charconv>
#include <fstream>
#include <unordered_set>

namespace tafs {

std::size_t FeatureFrame::find(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].name == name) {
            return i;
        }
    }
    return columns.size();
}

void FeatureFrame::validate() const {
    std::unordered_set<std::string> seen;
    for (const auto& col : columns) {
        if (!seen.insert(col.name).second) {
            throw SchemaError("duplicate feature column '" + col.name + "'");
        }
        if (col.values.size() != dates.size()) {
            throw SchemaError("column '" + col.name + "' is not aligned with the date axis");
        }
    }
    for (std::size_t i = 1; i < dates.size(); ++i) {
        if (!(dates[i - 1] < dates[i])) {
            throw OrderingError("frame dates are not strictly increasing at " + format_date(dates[i]));
        }
    }
}

FeatureFrame FeatureFrame::slice(std::size_t first, std::size_t last) const {
    FeatureFrame out;
    out.dates.assign(dates.begin() + static_cast<std::ptrdiff_t>(first),
                     dates.begin() + static_cast<std::ptrdiff_t>(last));
    out.columns.reserve(columns.size());
    for (const auto& col : columns) {
        out.columns.push_back({col.name, {col.values.begin() + static_cast<std::ptrdiff_t>(first),
                                          col.values.begin() + static_cast<std::ptrdiff_t>(last)}});
    }
    return out;
}

std::string group_of(std::string_view column_name) {
    auto name = column_name.substr(0, column_name.find('@'));
    return std::string(name.substr(0, name.find(':')));
}

std::string format_number(double v) {
    if (is_missing(v)) {
        return {};
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_frame_csv(const FeatureFrame& frame, std::ostream& out) {
    out << "Date";
    for (const auto& col : frame.columns) {
        out << ',' << col.name;
    }
    out << '\n';
    for (std::size_t r = 0; r < frame.rows(); ++r) {
        out << format_date(frame.dates[r]);
        for (const auto& col : frame.columns) {
            out << ',' << format_number(col.values[r]);
        }
        out << '\n';
    }
}

void write_frame_csv(const FeatureFrame& frame, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    write_frame_csv(frame, out);
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

FeatureFrame read_frame_csv(std::istream& in) {
    std::string line;
    if (!detail::read_line(in, line) || detail::trim(line).empty()) {
        throw EmptyInputError("feature CSV is empty");
    }
    const auto header = detail::split(line, ',');
    if (header.empty() || detail::trim(header[0]) != "Date") {
        throw SchemaError("feature CSV must start with a Date column");
    }
    FeatureFrame frame;
    for (std::size_t c = 1; c < header.size(); ++c) {
        frame.columns.push_back({std::string(detail::trim(header[c])), {}});
    }
    while (detail::read_line(in, line)) {
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto fields = detail::split(line, ',');
        if (fields.size() != header.size()) {
            throw SchemaError("feature CSV row has " + std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(header.size()));
        }
        const auto date = parse_date(detail::trim(fields[0]));
        if (!date) {
            throw SchemaError("bad date '" + fields[0] + "'");
        }
        frame.dates.push_back(*date);
        for (std::size_t c = 1; c < fields.size(); ++c) {
            double v = kMissing;
            if (!detail::parse_double(fields[c], v)) {
                v = kMissing;
            }
            frame.columns[c - 1].values.push_back(v);
        }
    }
    if (frame.rows() == 0) {
        throw EmptyInputError("feature CSV has no rows");
    }
    frame.validate();
    return frame;
}

FeatureFrame read_frame_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    return read_frame_csv(in);
}

}  // namespace tafs
