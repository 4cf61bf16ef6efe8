#include "tafs/ingest.hpp"

#include "common/text.hpp"
#include "tafs/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

namespace tafs::ingest {

namespace {

constexpr std::size_t kFieldCount = 7;

std::vector<double>* column_at(PriceSeries& s, std::size_t field) {
    switch (field) {
        case 1: return &s.open;
        case 2: return &s.high;
        case 3: return &s.low;
        case 4: return &s.close;
        case 5: return &s.adj_close;
        case 6: return &s.volume;
        default: return nullptr;
    }
}

void check_header(std::string line) {
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) {
        line.erase(0, 3);
    }
    const auto fields = detail::split(line, ',');
    const auto expected = detail::split(kOhlcvHeader, ',');
    if (fields.size() != expected.size()) {
        throw SchemaError("OHLCV header has " + std::to_string(fields.size()) + " columns, expected '" +
                          std::string(kOhlcvHeader) + "'");
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (detail::trim(fields[i]) != expected[i]) {
            throw SchemaError("OHLCV header column " + std::to_string(i + 1) + " is '" + fields[i] +
                              "', expected '" + expected[i] + "'");
        }
    }
}

}  // namespace

void PriceSeries::validate() const {
    const std::size_t n = dates.size();
    if (n == 0) {
        throw EmptyInputError("price series is empty");
    }
    for (const auto* col : {&open, &high, &low, &close, &adj_close, &volume}) {
        if (col->size() != n) {
            throw ShapeError("price series columns have unequal lengths");
        }
    }
    for (std::size_t i = 1; i < n; ++i) {
        if (!(dates[i - 1] < dates[i])) {
            throw OrderingError("dates must be strictly increasing; offending date " + format_date(dates[i]));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!is_missing(high[i]) && !is_missing(low[i]) && high[i] < low[i]) {
            throw SchemaError("high below low on " + format_date(dates[i]));
        }
        if (!is_missing(volume[i]) && volume[i] < 0.0) {
            throw SchemaError("negative volume on " + format_date(dates[i]));
        }
    }
}

std::size_t PriceSeries::missing_count() const {
    std::size_t count = 0;
    for (const auto* col : {&open, &high, &low, &close, &adj_close, &volume}) {
        count += static_cast<std::size_t>(std::count_if(col->begin(), col->end(), is_missing));
    }
    return count;
}

PriceSeries PriceSeries::slice(std::size_t first, std::size_t last) const {
    auto cut = [&](const auto& v) {
        return std::decay_t<decltype(v)>(v.begin() + static_cast<std::ptrdiff_t>(first),
                                         v.begin() + static_cast<std::ptrdiff_t>(last));
    };
    return PriceSeries{cut(dates), cut(open), cut(high), cut(low), cut(close), cut(adj_close), cut(volume)};
}

PriceSeries parse_ohlcv(std::istream& in) {
    std::string line;
    if (!detail::read_line(in, line) || detail::trim(line).empty()) {
        throw EmptyInputError("OHLCV input is empty");
    }
    check_header(line);

    PriceSeries series;
    std::size_t line_no = 1;
    while (detail::read_line(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) {
            continue;
        }
        const auto fields = detail::split(line, ',');
        if (fields.size() != kFieldCount) {
            throw SchemaError("line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                              " fields, expected 7");
        }
        const auto date = parse_date(detail::trim(fields[0]));
        if (!date) {
            throw SchemaError("line " + std::to_string(line_no) + ": bad date '" + fields[0] + "'");
        }
        series.dates.push_back(*date);
        for (std::size_t f = 1; f < kFieldCount; ++f) {
            double v = kMissing;
            if (!detail::parse_double(fields[f], v) || !std::isfinite(v)) {
                v = kMissing;
            }
            column_at(series, f)->push_back(v);
        }
    }
    if (series.size() == 0) {
        throw EmptyInputError("OHLCV input has a header but no rows");
    }
    series.validate();
    return series;
}

PriceSeries load_ohlcv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    return parse_ohlcv(in);
}

void write_ohlcv(const PriceSeries& series, std::ostream& out) {
    out << kOhlcvHeader << '\n';
    for (std::size_t i = 0; i < series.size(); ++i) {
        out << format_date(series.dates[i]) << ',' << format_number(series.open[i]) << ','
            << format_number(series.high[i]) << ',' << format_number(series.low[i]) << ','
            << format_number(series.close[i]) << ',' << format_number(series.adj_close[i]) << ','
            << format_number(series.volume[i]) << '\n';
    }
}

void write_ohlcv(const PriceSeries& series, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    write_ohlcv(series, out);
}

PriceSeries synthetic_ohlcv(std::size_t days, std::uint64_t seed, Date start) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    PriceSeries s;
    double prev_close = 100.0;
    std::chrono::sys_days day{start};
    while (s.size() < days) {
        const std::chrono::weekday wd{day};
        if (wd == std::chrono::Saturday || wd == std::chrono::Sunday) {
            day += std::chrono::days{1};
            continue;
        }
        const double open = prev_close * std::exp(0.004 * normal(rng));
        const double close = open * std::exp(0.0004 + 0.015 * normal(rng));
        const double high = std::max(open, close) * (1.0 + 0.006 * std::abs(normal(rng)));
        const double low = std::min(open, close) * (1.0 - 0.006 * std::abs(normal(rng)));
        const double volume = std::round(1.0e6 * std::exp(0.3 * normal(rng)));
        s.dates.emplace_back(day);
        s.open.push_back(open);
        s.high.push_back(high);
        s.low.push_back(low);
        s.close.push_back(close);
        s.adj_close.push_back(close);
        s.volume.push_back(volume);
        prev_close = close;
        day += std::chrono::days{1};
    }
    return s;
}

}  // namespace tafs::ingest
