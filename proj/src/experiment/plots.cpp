#include "tafs/experiment.hpp"

#include "common/text.hpp"
#include "tafs/error.hpp"
#include "tafs/feature_frame.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace tafs::experiment {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kCensusRows = 30;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::string xml_escape(std::string_view text) {
    std::string out;
    for (const char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out << text;
    if (!out) {
        throw IoError("failed writing '" + path.string() + "'");
    }
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Table read_table(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    Table t;
    std::string line;
    if (detail::read_line(in, line)) {
        t.header = detail::split(line, ',');
    }
    while (detail::read_line(in, line)) {
        if (!line.empty()) {
            t.rows.push_back(detail::split(line, ','));
        }
    }
    return t;
}

std::vector<double> column(const Table& t, std::size_t c) {
    std::vector<double> out;
    for (const auto& row : t.rows) {
        double v = kMissing;
        if (c < row.size() && !detail::parse_double(row[c], v)) {
            v = kMissing;
        }
        out.push_back(v);
    }
    return out;
}

// Re-renders the chart belonging to a figure CSV written by emit_plots.
void render_from_csv(const fs::path& csv) {
    const auto t = read_table(csv);
    const auto stem = csv.stem().string();
    std::vector<std::pair<std::string, std::vector<double>>> series;
    std::string title;
    std::string x_label;
    if (stem == "census") {
        series.emplace_back("percent", column(t, 3));
        title = "Share of selection runs choosing each indicator (top " + std::to_string(t.rows.size()) + ")";
        x_label = "indicator rank";
    } else if (stem == "window_sweep") {
        series.emplace_back("test mse", column(t, 1));
        title = "Test MSE by window size";
        x_label = "window sizes:";
        for (const auto& row : t.rows) {
            x_label += " " + row.at(0);
        }
    } else {
        for (std::size_t c = 1; c < t.header.size(); ++c) {
            series.emplace_back(t.header[c], column(t, c));
        }
        title = "Predicted vs actual, " + stem.substr(std::min<std::size_t>(5, stem.size()));
        x_label = "test day";
    }
    write_text(fs::path(csv).replace_extension(".svg"), svg_line_chart(title, x_label, series, t.rows.size()));
}

void write_census(const fs::path& dir, const std::vector<select::SelectionResult>& selections) {
    const auto census = select::top_indicator_census(selections);
    std::ostringstream csv;
    csv << "rank,indicator,count,percent\n";
    for (std::size_t i = 0; i < std::min(kCensusRows, census.size()); ++i) {
        csv << i + 1 << "," << census[i].group << "," << census[i].count << "," << format_number(census[i].percent)
            << "\n";
    }
    write_text(dir / "census.csv", csv.str());
    render_from_csv(dir / "census.csv");
}

}  // namespace

std::string svg_line_chart(std::string_view title, std::string_view x_label,
                           const std::vector<std::pair<std::string, std::vector<double>>>& series, std::size_t points) {
    constexpr double W = 720, H = 400, L = 70, R = 20, T = 40, B = 50;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& [name, values] : series) {
        for (const double v : values) {
            if (std::isfinite(v)) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
    }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi == lo) {
        hi = lo + 1.0;
    }
    const auto px = [&](std::size_t i) {
        return points <= 1 ? L + (W - L - R) / 2 : L + (W - L - R) * static_cast<double>(i) / static_cast<double>(points - 1);
    };
    const auto py = [&](double v) { return H - B - (H - T - B) * (v - lo) / (hi - lo); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
        << " " << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
        << "</text>\n";
    svg << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double v = lo + (hi - lo) * k / 4.0;
        svg << "<text x=\"" << L - 6 << "\" y=\"" << fixed(py(v) + 4, 1) << "\" text-anchor=\"end\">"
            << xml_escape(format_number(std::round(v * 1e4) / 1e4)) << "</text>\n";
    }
    svg << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xml_escape(x_label)
        << "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        const auto* color = kColors[s % std::size(kColors)];
        std::string path;
        for (std::size_t i = 0; i < series[s].second.size(); ++i) {
            const double v = series[s].second[i];
            if (std::isfinite(v)) {
                path += (path.empty() ? "" : " ") + fixed(px(i)) + "," + fixed(py(v));
            }
        }
        svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"" << path
            << "\"/>\n";
        svg << "<text x=\"" << L + 10 << "\" y=\"" << T + 14 * (s + 1) << "\" fill=\"" << color << "\">"
            << xml_escape(series[s].first) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_plots(const std::string& out_dir, const std::vector<PredictionReport>& reports,
                const std::vector<SweepPoint>& sweep, const std::vector<select::SelectionResult>& selections,
                const Log& log) {
    const fs::path dir = fs::path(out_dir) / "plots";
    try {
        fs::create_directories(dir);
    } catch (const fs::filesystem_error& e) {
        throw IoError(std::string("cannot create plot directory: ") + e.what());
    }

    for (const auto& r : reports) {
        std::ostringstream csv;
        csv << "date,actual,selected,all_features\n";
        for (Eigen::Index i = 0; i < r.actual.size(); ++i) {
            const auto idx = static_cast<std::size_t>(i);
            csv << (idx < r.test_dates.size() ? format_date(r.test_dates[idx]) : std::to_string(idx)) << ","
                << format_number(r.actual(i)) << "," << format_number(r.predicted_selected(i)) << ","
                << format_number(r.predicted_baseline(i)) << "\n";
        }
        const auto path = dir / ("pred_" + run_name(r.run) + ".csv");
        write_text(path, csv.str());
        render_from_csv(path);
    }

    if (sweep.empty()) {
        if (log) {
            log("warning: window sweep is empty; no window_sweep plot written");
        }
    } else {
        std::ostringstream csv;
        csv << "window,mse\n";
        for (const auto& p : sweep) {
            csv << p.window << "," << format_number(p.mse) << "\n";
        }
        write_text(dir / "window_sweep.csv", csv.str());
        render_from_csv(dir / "window_sweep.csv");
    }

    if (!selections.empty()) {
        write_census(dir, selections);
    }
}

void rebuild_report(const std::string& out_dir, const Log& log) {
    const fs::path root(out_dir);
    const fs::path sel_dir = root / "selection";
    if (!fs::is_directory(sel_dir)) {
        throw IoError("'" + sel_dir.string() + "' is not a directory");
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(sel_dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<select::SelectionResult> results;
    for (const auto& f : files) {
        results.push_back(select::read_selection(f.string()));
    }
    if (results.empty()) {
        throw EmptyInputError("no selection results under '" + sel_dir.string() + "'");
    }
    const fs::path dir = root / "plots";
    fs::create_directories(dir);
    write_census(dir, results);

    std::vector<fs::path> figures;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const auto& p = entry.path();
        if (p.extension() == ".csv" && p.stem() != "census") {
            figures.push_back(p);
        }
    }
    std::sort(figures.begin(), figures.end());
    for (const auto& f : figures) {
        render_from_csv(f);
    }
    if (log) {
        log("report rebuilt from " + std::to_string(results.size()) + " selection results and " +
            std::to_string(figures.size()) + " figure tables");
    }
}

}  // namespace tafs::experiment
