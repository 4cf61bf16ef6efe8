#include "tafs/indicators.hpp"

#include "common/text.hpp"
#include "indicators/native.hpp"
#include "tafs/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tafs::indicators {

std::string IndicatorSpec::to_string() const {
    std::string out = name;
    if (!params.empty()) {
        out += '(';
        for (std::size_t i = 0; i < params.size(); ++i) {
            out += (i ? "," : "") + params[i].first + "=" + format_number(params[i].second);
        }
        out += ')';
    }
    return out;
}

double ParamSet::get(std::string_view key) const {
    for (const auto& [name, value] : values_) {
        if (name == key) {
            return value;
        }
    }
    throw ConfigError(indicator_ + ": no parameter '" + std::string(key) + "'");
}

std::size_t ParamSet::length(std::string_view key) const {
    const double v = get(key);
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e6) {
        throw ConfigError(indicator_ + ": parameter '" + std::string(key) + "' must be an integer >= 1, got " +
                          format_number(v));
    }
    return static_cast<std::size_t>(v);
}

Registry Registry::with_natives() {
    Registry r;
    for (auto& def : native_definitions()) {
        r.register_indicator(std::move(def.name), std::move(def.defaults), std::move(def.make));
    }
    return r;
}

void Registry::register_indicator(std::string name, Params defaults, IndicatorFactory make) {
    if (name.empty() || name.find_first_of(":@,;() ") != std::string::npos) {
        throw ConfigError("invalid indicator name '" + name + "'");
    }
    if (entries_.contains(name)) {
        throw ConflictError("indicator '" + name + "' is already registered");
    }
    auto key = name;
    entries_.emplace(std::move(key), RegistryEntry{std::move(name), std::move(defaults), std::move(make)});
}

bool Registry::contains(std::string_view name) const { return entries_.find(name) != entries_.end(); }

const RegistryEntry& Registry::at(std::string_view name) const {
    const auto it = entries_.find(name);
    if (it == entries_.end()) {
        throw UnknownIndicatorError("unknown indicator '" + std::string(name) + "'");
    }
    return it->second;
}

std::vector<std::string> Registry::names() const {
    std::vector<std::string> out;
    for (const auto& [name, entry] : entries_) {
        out.push_back(name);
    }
    return out;
}

ParamSet Registry::resolve(const IndicatorSpec& spec) const {
    const auto& entry = at(spec.name);
    Params merged = entry.defaults;
    for (const auto& [key, value] : spec.params) {
        auto it = std::find_if(merged.begin(), merged.end(), [&](const auto& kv) { return kv.first == key; });
        if (it == merged.end()) {
            throw ConfigError(spec.name + ": unknown parameter '" + key + "'");
        }
        if (!std::isfinite(value)) {
            throw ConfigError(spec.name + ": parameter '" + key + "' is not finite");
        }
        it->second = value;
    }
    return ParamSet(spec.name, std::move(merged));
}

std::unique_ptr<Indicator> Registry::instantiate(const IndicatorSpec& spec) const {
    auto indicator = at(spec.name).make(resolve(spec));
    if (!indicator) {
        throw ConfigError(spec.name + ": constructor returned no indicator");
    }
    return indicator;
}

std::string Registry::label(const IndicatorSpec& spec) const {
    const auto& entry = at(spec.name);
    const auto resolved = resolve(spec);
    if (resolved.values() == entry.defaults) {
        return spec.name;
    }
    std::string out = spec.name;
    for (const auto& [key, value] : resolved.values()) {
        auto text = format_number(value);
        std::replace(text.begin(), text.end(), '.', 'p');
        std::replace(text.begin(), text.end(), '-', 'm');
        out += "_" + text;
    }
    return out;
}

std::vector<std::string> Registry::output_columns(const IndicatorSpec& spec) const {
    const auto base = label(spec);
    std::vector<std::string> cols;
    for (const auto& suffix : instantiate(spec)->outputs()) {
        cols.push_back(suffix.empty() ? base : base + ":" + suffix);
    }
    return cols;
}

const Registry& native_registry() {
    static const Registry registry = Registry::with_natives();
    return registry;
}

std::vector<IndicatorSpec> default_roster() {
    std::vector<IndicatorSpec> roster;
    for (const auto& def : native_definitions()) {
        roster.push_back({def.name, {}});
    }
    return roster;
}

FeatureFrame compute(const IndicatorSpec& spec, const ingest::PriceSeries& series, const Registry& registry) {
    const auto indicator = registry.instantiate(spec);
    const auto names = registry.output_columns(spec);
    if (series.size() <= indicator->warmup()) {
        throw InsufficientHistoryError(spec.to_string() + " needs more than " + std::to_string(indicator->warmup()) +
                                       " rows, series has " + std::to_string(series.size()));
    }
    auto outputs = indicator->compute(series);
    if (outputs.size() != names.size()) {
        throw SchemaError(spec.to_string() + " produced " + std::to_string(outputs.size()) + " outputs, declared " +
                          std::to_string(names.size()));
    }
    FeatureFrame frame;
    frame.dates = series.dates;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (outputs[i].size() != series.size()) {
            throw SchemaError(spec.to_string() + " output '" + names[i] + "' is not aligned with the input");
        }
        frame.columns.push_back({names[i], std::move(outputs[i])});
    }
    return frame;
}

FeatureFrame compute_all(const std::vector<IndicatorSpec>& specs, const ingest::PriceSeries& series,
                         const Registry& registry) {
    if (specs.empty()) {
        throw ConfigError("indicator roster is empty");
    }
    FeatureFrame frame;
    frame.dates = series.dates;
    for (const auto& spec : specs) {
        auto part = compute(spec, series, registry);
        for (auto& col : part.columns) {
            if (frame.find(col.name) != frame.cols()) {
                throw SchemaError("duplicate output column '" + col.name + "'");
            }
            frame.columns.push_back(std::move(col));
        }
    }
    return frame;
}

FeatureFrame drop_warmup(const FeatureFrame& frame, std::size_t* dropped) {
    if (frame.rows() == 0) {
        throw EmptyInputError("cannot drop warm-up rows from an empty frame");
    }
    std::size_t first = 0;
    for (const auto& col : frame.columns) {
        std::size_t lead = 0;
        while (lead < col.values.size() && is_missing(col.values[lead])) {
            ++lead;
        }
        first = std::max(first, lead);
    }
    if (first >= frame.rows()) {
        throw EmptyInputError("every row is inside some indicator's warm-up period");
    }
    if (dropped) {
        *dropped = first;
    }
    return frame.slice(first, frame.rows());
}

IndicatorSpec parse_spec(std::string_view text) {
    text = detail::trim(text);
    IndicatorSpec spec;
    const auto open = text.find('(');
    if (open == std::string_view::npos) {
        spec.name = std::string(text);
    } else {
        if (text.back() != ')') {
            throw ConfigError("indicator spec '" + std::string(text) + "' is missing ')'");
        }
        spec.name = std::string(detail::trim(text.substr(0, open)));
        const auto body = detail::trim(text.substr(open + 1, text.size() - open - 2));
        if (!body.empty()) {
            for (const auto& item : detail::split(body, ',')) {
                const auto eq = item.find('=');
                double value = 0.0;
                if (eq == std::string::npos || !detail::parse_double(std::string_view(item).substr(eq + 1), value)) {
                    throw ConfigError("bad parameter '" + item + "' in '" + std::string(text) + "'");
                }
                spec.params.emplace_back(std::string(detail::trim(std::string_view(item).substr(0, eq))), value);
            }
        }
    }
    if (spec.name.empty()) {
        throw ConfigError("indicator spec '" + std::string(text) + "' has no name");
    }
    return spec;
}

std::vector<IndicatorSpec> parse_roster(std::istream& in) {
    std::vector<IndicatorSpec> specs;
    std::string line;
    while (detail::read_line(in, line)) {
        const auto hash = line.find('#');
        for (const auto& part : detail::split(std::string_view(line).substr(0, hash), ';')) {
            if (!detail::trim(part).empty()) {
                specs.push_back(parse_spec(part));
            }
        }
    }
    return specs;
}

std::vector<IndicatorSpec> parse_roster(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_roster(in);
}

std::vector<IndicatorSpec> load_roster(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open roster '" + path + "'");
    }
    return parse_roster(in);
}

}  // namespace tafs::indicators
