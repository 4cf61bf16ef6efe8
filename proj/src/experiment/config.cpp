#include "tafs/experiment.hpp"

#include "common/text.hpp"
#include "tafs/error.hpp"
#include "tafs/feature_frame.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace tafs::experiment {

namespace {

bool parse_bool(std::string_view key, std::string_view value) {
    const auto v = detail::lower(detail::trim(value));
    if (v == "true" || v == "yes" || v == "1" || v == "on") {
        return true;
    }
    if (v == "false" || v == "no" || v == "0" || v == "off") {
        return false;
    }
    throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(value) + "'");
}

double parse_real(std::string_view key, std::string_view value) {
    double v = 0.0;
    if (!detail::parse_double(detail::trim(value), v) || !std::isfinite(v)) {
        throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(value) + "'");
    }
    return v;
}

std::uint64_t parse_count(std::string_view key, std::string_view value) {
    const auto t = detail::trim(value);
    std::uint64_t v = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || res.ec != std::errc{} || res.ptr != t.data() + t.size()) {
        throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + std::string(value) + "'");
    }
    return v;
}

Date parse_day(std::string_view key, std::string_view value) {
    const auto d = parse_date(detail::trim(value));
    if (!d) {
        throw ConfigError(std::string(key) + ": expected a YYYY-MM-DD date, got '" + std::string(value) + "'");
    }
    return *d;
}

std::vector<std::string> parse_list(std::string_view value) {
    std::vector<std::string> out;
    for (const auto& item : detail::split(value, ',')) {
        const auto t = detail::trim(item);
        if (!t.empty()) {
            out.emplace_back(t);
        }
    }
    return out;
}

std::string resolve(const std::string& base_dir, std::string_view path) {
    const std::filesystem::path p{std::string(detail::trim(path))};
    if (p.empty() || p.is_absolute() || base_dir.empty() || base_dir == ".") {
        return p.string();
    }
    return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

template <typename T, typename Fn>
std::string join(const std::vector<T>& items, Fn fn, std::string_view sep = ", ") {
    std::string out;
    for (const auto& item : items) {
        if (!out.empty()) {
            out += sep;
        }
        out += std::string(fn(item));
    }
    return out;
}

[[noreturn]] void unknown(std::string_view section, std::string_view key) {
    throw ConfigError("unknown setting '" + (section.empty() ? "" : std::string(section) + ".") + std::string(key) +
                      "'");
}

}  // namespace

void apply_setting(ExperimentConfig& c, std::string_view section, std::string_view key_text, std::string_view value,
                   const std::string& base_dir) {
    const auto key = detail::lower(detail::trim(key_text));
    const auto sec = std::string(detail::trim(section));
    const auto v = detail::trim(value);
    if (sec.empty()) {
        if (key == "seed") {
            c.seed = parse_count(key, v);
        } else if (key == "fast") {
            c.fast = parse_bool(key, v);
        } else if (key == "fast_cap") {
            c.fast_cap = parse_count(key, v);
        } else if (key == "threads") {
            c.threads = parse_count(key, v);
        } else {
            unknown(sec, key);
        }
    } else if (sec == "data") {
        if (key == "input") {
            c.input = resolve(base_dir, v);
        } else if (key == "synthetic_days") {
            c.synthetic_days = parse_count(key, v);
        } else if (key == "selection_start") {
            c.selection_start = parse_day(key, v);
        } else if (key == "selection_end") {
            c.selection_end = parse_day(key, v);
        } else if (key == "prediction_start") {
            c.prediction_start = parse_day(key, v);
        } else if (key == "prediction_end") {
            c.prediction_end = parse_day(key, v);
        } else if (key == "selection_fraction") {
            c.selection_fraction = parse_real(key, v);
        } else if (key == "train_fraction") {
            c.train_fraction = parse_real(key, v);
        } else if (key == "shuffle_split") {
            c.shuffle_split = parse_bool(key, v);
        } else if (key == "scale_target") {
            c.scale_target = parse_bool(key, v);
        } else if (key == "scaler_fit") {
            const auto mode = detail::lower(v);
            if (mode != "train" && mode != "partition") {
                throw ConfigError("scaler_fit: expected train or partition, got '" + std::string(v) + "'");
            }
            c.scaler_fit_full = mode == "partition";
        } else {
            unknown(sec, key);
        }
    } else if (sec == "indicators") {
        if (key == "roster") {
            c.roster = indicators::parse_roster(v);
            c.roster_set = true;
        } else if (key == "roster_file") {
            c.roster = indicators::load_roster(resolve(base_dir, v));
            c.roster_set = true;
        } else {
            unknown(sec, key);
        }
    } else if (sec == "window") {
        if (key == "size") {
            c.window.window = parse_count(key, v);
        } else if (key == "horizon") {
            c.window.horizon = parse_count(key, v);
        } else if (key == "sweep") {
            c.sweep_sizes.clear();
            for (const auto& item : parse_list(v)) {
                c.sweep_sizes.push_back(parse_count(key, item));
            }
        } else if (key == "sweep_regressor") {
            c.sweep_family = regress::parse_family(v);
        } else {
            unknown(sec, key);
        }
    } else if (sec == "selection") {
        if (key == "methods") {
            c.methods.clear();
            c.matrix_set = true;
            for (const auto& item : parse_list(v)) {
                c.methods.push_back(select::parse_method(item));
            }
        } else if (key == "regressors") {
            c.families.clear();
            c.matrix_set = true;
            for (const auto& item : parse_list(v)) {
                c.families.push_back(regress::parse_family(item));
            }
        } else if (key == "metrics") {
            c.metrics.clear();
            c.matrix_set = true;
            for (const auto& item : parse_list(v)) {
                c.metrics.push_back(evaluate::parse_metric(item));
            }
        } else if (key == "cv_folds") {
            c.cv_folds = parse_count(key, v);
        } else if (key == "cv_shuffle") {
            c.cv_shuffle = parse_bool(key, v);
        } else if (key == "group_by_indicator") {
            c.group_by_indicator = parse_bool(key, v);
        } else if (key == "max_steps") {
            c.max_steps = parse_count(key, v);
        } else if (key == "score_on") {
            const auto mode = detail::lower(v);
            if (mode != "train" && mode != "partition") {
                throw ConfigError("score_on: expected train or partition, got '" + std::string(v) + "'");
            }
            c.score_on_full_partition = mode == "partition";
        } else {
            unknown(sec, key);
        }
    } else if (sec.starts_with("regressors.")) {
        const auto family = regress::parse_family(std::string_view(sec).substr(11));
        c.overrides[family][key] = std::string(v);
    } else if (sec == "output") {
        if (key == "dir") {
            c.out_dir = std::string(v);
        } else {
            unknown(sec, key);
        }
    } else {
        throw ConfigError("unknown config section [" + sec + "]");
    }
}

ExperimentConfig parse_config(std::istream& in, const std::string& base_dir) {
    ExperimentConfig config;
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (detail::read_line(in, line)) {
        ++line_no;
        const auto t = detail::trim(line);
        if (t.empty() || t.front() == '#' || t.front() == ';') {
            continue;
        }
        try {
            if (t.front() == '[') {
                if (t.back() != ']') {
                    throw ConfigError("unterminated section header");
                }
                section = std::string(detail::trim(t.substr(1, t.size() - 2)));
                if (section.starts_with("regressors.")) {
                    regress::parse_family(std::string_view(section).substr(11));
                }
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigError("expected key = value");
            }
            apply_setting(config, section, t.substr(0, eq), t.substr(eq + 1), base_dir);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::Config) {
                throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
            }
            throw;
        }
    }
    return config;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config '" + path + "'");
    }
    const auto dir = std::filesystem::path(path).parent_path().string();
    return parse_config(in, dir.empty() ? "." : dir);
}

void ExperimentConfig::validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train_fraction must lie strictly between 0 and 1");
    }
    if (!(selection_fraction > 0.0 && selection_fraction < 1.0)) {
        throw ConfigError("selection_fraction must lie strictly between 0 and 1");
    }
    if (input.empty() && synthetic_days == 0) {
        throw ConfigError("no input file and synthetic_days = 0");
    }
    const bool any_date = selection_start || selection_end || prediction_start || prediction_end;
    if (any_date) {
        if (!selection_end || !prediction_start) {
            throw ConfigError("date partitions need at least selection_end and prediction_start");
        }
        if (*selection_end >= *prediction_start) {
            throw ConfigError("the selection partition must end before the prediction partition starts");
        }
        if (selection_start && *selection_start > *selection_end) {
            throw ConfigError("selection_start is after selection_end");
        }
        if (prediction_end && *prediction_start > *prediction_end) {
            throw ConfigError("prediction_start is after prediction_end");
        }
    }
    if (roster.empty()) {
        throw ConfigError("the indicator roster is empty");
    }
    window.validate();
    for (const auto w : sweep_sizes) {
        if (w < 1) {
            throw ConfigError("window sweep sizes must be >= 1");
        }
    }
    if (methods.empty() || families.empty() || metrics.empty()) {
        throw ConfigError("the selection matrix is empty (methods, regressors and metrics each need an entry)");
    }
    if (cv_folds < 2) {
        throw ConfigError("cv_folds must be at least 2");
    }
    if (fast && fast_cap < 1) {
        throw ConfigError("fast_cap must be at least 1");
    }
    for (const auto& [family, params] : overrides) {
        regressor(family).validate();
    }
    for (const auto family : families) {
        regressor(family).validate();
    }
    regressor(sweep_family).validate();
}

std::vector<indicators::IndicatorSpec> fast_roster() {
    return indicators::parse_roster("sma; ema; wma; mom; roc; rsi; macd; bbands; stoch; willr; atr; obv");
}

ExperimentConfig resolve_profile(ExperimentConfig config) {
    if (!config.fast) {
        return config;
    }
    if (!config.roster_set) {
        config.roster = fast_roster();
        config.roster_set = true;
    }
    if (!config.matrix_set) {
        config.methods = {select::Method::SFS, select::Method::SBS};
        config.families = {regress::Family::LR, regress::Family::Ridge, regress::Family::KNN, regress::Family::DTR};
        config.metrics = {evaluate::Metric::MSE};
        config.matrix_set = true;
    }
    return config;
}

regress::RegressorConfig ExperimentConfig::regressor(regress::Family family) const {
    auto c = regress::RegressorConfig::tuned(family, seed);
    if (const auto it = overrides.find(family); it != overrides.end()) {
        for (const auto& [key, value] : it->second) {
            c.set(key, value);
        }
    }
    return fast ? c.fast(fast_cap) : c;
}

std::string canonical_text(const ExperimentConfig& c) {
    std::ostringstream out;
    const auto flag = [](bool b) { return b ? "true" : "false"; };
    const auto day = [](const std::optional<Date>& d) { return d ? format_date(*d) : std::string(); };
    out << "seed = " << c.seed << "\n";
    out << "fast = " << flag(c.fast) << "\n";
    out << "fast_cap = " << c.fast_cap << "\n";
    out << "\n[data]\n";
    out << "input = " << c.input << "\n";
    out << "synthetic_days = " << c.synthetic_days << "\n";
    if (c.selection_start) out << "selection_start = " << day(c.selection_start) << "\n";
    if (c.selection_end) out << "selection_end = " << day(c.selection_end) << "\n";
    if (c.prediction_start) out << "prediction_start = " << day(c.prediction_start) << "\n";
    if (c.prediction_end) out << "prediction_end = " << day(c.prediction_end) << "\n";
    out << "selection_fraction = " << format_number(c.selection_fraction) << "\n";
    out << "train_fraction = " << format_number(c.train_fraction) << "\n";
    out << "shuffle_split = " << flag(c.shuffle_split) << "\n";
    out << "scale_target = " << flag(c.scale_target) << "\n";
    out << "scaler_fit = " << (c.scaler_fit_full ? "partition" : "train") << "\n";
    out << "\n[indicators]\n";
    out << "roster = " << join(c.roster, [](const indicators::IndicatorSpec& s) { return s.to_string(); }, "; ") << "\n";
    out << "\n[window]\n";
    out << "size = " << c.window.window << "\n";
    out << "horizon = " << c.window.horizon << "\n";
    out << "sweep = " << join(c.sweep_sizes, [](std::size_t w) { return std::to_string(w); }) << "\n";
    out << "sweep_regressor = " << regress::family_name(c.sweep_family) << "\n";
    out << "\n[selection]\n";
    out << "methods = " << join(c.methods, select::method_name) << "\n";
    out << "regressors = " << join(c.families, regress::family_name) << "\n";
    out << "metrics = " << join(c.metrics, evaluate::metric_name) << "\n";
    out << "cv_folds = " << c.cv_folds << "\n";
    out << "cv_shuffle = " << flag(c.cv_shuffle) << "\n";
    out << "group_by_indicator = " << flag(c.group_by_indicator) << "\n";
    out << "max_steps = " << c.max_steps << "\n";
    out << "score_on = " << (c.score_on_full_partition ? "partition" : "train") << "\n";
    for (const auto& [family, params] : c.overrides) {
        out << "\n[regressors." << regress::family_name(family) << "]\n";
        for (const auto& [key, value] : params) {
            out << key << " = " << value << "\n";
        }
    }
    return out.str();
}

std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : data) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace tafs::experiment
