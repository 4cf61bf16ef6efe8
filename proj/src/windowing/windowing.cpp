#include "tafs/windowing.hpp"

#include "common/text.hpp"
#include "tafs/error.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <unordered_set>

namespace tafs::windowing {

void WindowSpec::validate() const {
    if (window < 1) {
        throw ConfigError("window size must be >= 1");
    }
    if (horizon < 1) {
        throw ConfigError("horizon must be >= 1");
    }
}

std::vector<std::size_t> FeatureGroups::columns_of(std::span<const std::size_t> group_ids) const {
    std::vector<std::size_t> cols;
    for (const auto g : group_ids) {
        if (g >= columns.size()) {
            throw ReferenceError("feature group index " + std::to_string(g) + " out of range");
        }
        cols.insert(cols.end(), columns[g].begin(), columns[g].end());
    }
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    return cols;
}

std::size_t FeatureGroups::find(std::string_view label) const {
    const auto it = std::find(labels.begin(), labels.end(), label);
    return static_cast<std::size_t>(it - labels.begin());
}

FeatureGroups WindowedDataset::groups(bool by_indicator) const {
    FeatureGroups g;
    std::map<std::string, std::size_t, std::less<>> index;
    for (std::size_t c = 0; c < feature_names.size(); ++c) {
        const auto label = by_indicator ? group_of(feature_names[c]) : feature_names[c];
        auto [it, inserted] = index.emplace(label, g.labels.size());
        if (inserted) {
            g.labels.push_back(label);
            g.columns.emplace_back();
        }
        g.columns[it->second].push_back(c);
    }
    return g;
}

WindowedDataset WindowedDataset::select_columns(std::span<const std::size_t> cols) const {
    WindowedDataset out;
    out.X.resize(X.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j] >= this->cols()) {
            throw ReferenceError("feature column " + std::to_string(cols[j]) + " out of range");
        }
        out.X.col(static_cast<Eigen::Index>(j)) = X.col(static_cast<Eigen::Index>(cols[j]));
        out.feature_names.push_back(feature_names[cols[j]]);
    }
    out.y = y;
    out.sample_dates = sample_dates;
    out.target_dates = target_dates;
    return out;
}

WindowedDataset WindowedDataset::slice_rows(std::size_t first, std::size_t last) const {
    WindowedDataset out;
    const auto count = static_cast<Eigen::Index>(last - first);
    out.X = X.middleRows(static_cast<Eigen::Index>(first), count);
    out.y = y.segment(static_cast<Eigen::Index>(first), count);
    out.feature_names = feature_names;
    auto cut = [&](const std::vector<Date>& v) {
        return v.empty() ? v
                         : std::vector<Date>(v.begin() + static_cast<std::ptrdiff_t>(first),
                                             v.begin() + static_cast<std::ptrdiff_t>(last));
    };
    out.sample_dates = cut(sample_dates);
    out.target_dates = cut(target_dates);
    return out;
}

std::vector<double> align_targets(const FeatureFrame& frame, const ingest::PriceSeries& series) {
    std::vector<double> out;
    out.reserve(frame.rows());
    std::size_t j = 0;
    for (const auto& d : frame.dates) {
        while (j < series.size() && series.dates[j] < d) {
            ++j;
        }
        if (j == series.size() || series.dates[j] != d) {
            throw ReferenceError("no close price for frame date " + format_date(d));
        }
        out.push_back(series.close[j]);
    }
    return out;
}

WindowedDataset make_windows(const FeatureFrame& frame, std::span<const double> targets, const WindowSpec& spec) {
    spec.validate();
    const std::size_t n = frame.rows();
    const std::size_t k = frame.cols();
    const std::size_t w = spec.window;
    const std::size_t h = spec.horizon;
    if (targets.size() != n) {
        throw ShapeError("target series has " + std::to_string(targets.size()) + " entries, frame has " +
                         std::to_string(n) + " rows");
    }
    if (k == 0) {
        throw SchemaError("feature frame has no columns");
    }
    if (n < w + h) {
        throw InsufficientHistoryError("windowing needs at least w+h=" + std::to_string(w + h) + " rows, frame has " +
                                       std::to_string(n));
    }
    for (const auto& col : frame.columns) {
        if (std::any_of(col.values.begin(), col.values.end(), is_missing)) {
            throw SchemaError("column '" + col.name + "' has missing values; drop warm-up and impute first");
        }
    }
    if (std::any_of(targets.begin(), targets.end(), is_missing)) {
        throw SchemaError("target series has missing values");
    }

    const std::size_t m = n - w - h + 1;
    WindowedDataset out;
    out.X.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k * w));
    out.y.resize(static_cast<Eigen::Index>(m));
    for (std::size_t f = 0; f < k; ++f) {
        for (std::size_t lag = 0; lag < w; ++lag) {
            out.feature_names.push_back(frame.columns[f].name + "@" + std::to_string(lag));
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t last = i + w - 1;
        for (std::size_t f = 0; f < k; ++f) {
            const auto& values = frame.columns[f].values;
            for (std::size_t lag = 0; lag < w; ++lag) {
                out.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(f * w + lag)) = values[last - lag];
            }
        }
        out.y(static_cast<Eigen::Index>(i)) = targets[last + h];
        out.sample_dates.push_back(frame.dates[last]);
        out.target_dates.push_back(frame.dates[last + h]);
    }
    return out;
}

std::vector<WindowedDataset> window_size_sweep(const FeatureFrame& frame, std::span<const double> targets,
                                               std::span<const std::size_t> sizes, std::size_t horizon) {
    std::vector<WindowedDataset> out;
    out.reserve(sizes.size());
    for (const auto w : sizes) {
        out.push_back(make_windows(frame, targets, WindowSpec{w, horizon}));
    }
    return out;
}

void write_dataset_csv(const WindowedDataset& data, std::ostream& out) {
    for (const auto& name : data.feature_names) {
        out << name << ',';
    }
    out << "target\n";
    for (Eigen::Index r = 0; r < data.X.rows(); ++r) {
        for (Eigen::Index c = 0; c < data.X.cols(); ++c) {
            out << format_number(data.X(r, c)) << ',';
        }
        out << format_number(data.y(r)) << '\n';
    }
}

void write_dataset_csv(const WindowedDataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    write_dataset_csv(data, out);
}

WindowedDataset read_dataset_csv(std::istream& in) {
    std::string line;
    if (!detail::read_line(in, line) || detail::trim(line).empty()) {
        throw EmptyInputError("dataset CSV is empty");
    }
    auto header = detail::split(line, ',');
    if (header.size() < 2 || detail::trim(header.back()) != "target") {
        throw SchemaError("dataset CSV header must end with 'target' and have at least one feature");
    }
    header.pop_back();
    std::unordered_set<std::string> seen;
    for (auto& h : header) {
        h = std::string(detail::trim(h));
        if (!seen.insert(h).second) {
            throw SchemaError("duplicate feature '" + h + "' in dataset CSV");
        }
    }
    std::vector<double> values;
    std::size_t rows = 0;
    const std::size_t width = header.size() + 1;
    while (detail::read_line(in, line)) {
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto fields = detail::split(line, ',');
        if (fields.size() != width) {
            throw SchemaError("dataset CSV row " + std::to_string(rows + 1) + " has " + std::to_string(fields.size()) +
                              " fields, expected " + std::to_string(width));
        }
        for (const auto& f : fields) {
            double v = 0.0;
            if (!detail::parse_double(f, v)) {
                throw SchemaError("non-numeric dataset cell '" + f + "'");
            }
            values.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) {
        throw EmptyInputError("dataset CSV has no rows");
    }
    WindowedDataset data;
    data.feature_names = std::move(header);
    const auto d = static_cast<Eigen::Index>(width - 1);
    data.X.resize(static_cast<Eigen::Index>(rows), d);
    data.y.resize(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < d; ++c) {
            data.X(static_cast<Eigen::Index>(r), c) = values[r * width + static_cast<std::size_t>(c)];
        }
        data.y(static_cast<Eigen::Index>(r)) = values[r * width + width - 1];
    }
    return data;
}

WindowedDataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    return read_dataset_csv(in);
}

}  // namespace tafs::windowing
