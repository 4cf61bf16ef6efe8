#pragma once

#include "tafs/feature_frame.hpp"
#include "tafs/ingest.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tafs::indicators {

/// Ordered name -> value parameter list.
using Params = std::vector<std::pair<std::string, double>>;

/// One requested indicator: a registry key plus parameter overrides.
/// Parameters left out take the registered defaults.
struct IndicatorSpec {
    std::string name;
    Params params;

    /// `name(key=value,...)`, the roster-file syntax.
    std::string to_string() const;
};

/// Parameters after defaults have been merged in and names checked.
class ParamSet {
public:
    ParamSet(std::string indicator, Params values) : indicator_(std::move(indicator)), values_(std::move(values)) {}

    double get(std::string_view key) const;
    /// An integral window length >= 1; ConfigError otherwise.
    std::size_t length(std::string_view key) const;
    const Params& values() const { return values_; }

private:
    std::string indicator_;
    Params values_;
};

/// A configured indicator. compute() returns one series per output, each
/// aligned with the input dates; entry t only reads bars 0..t.
class Indicator {
public:
    virtual ~Indicator() = default;

    /// Output suffixes; a single empty string means a single unnamed output.
    virtual std::vector<std::string> outputs() const = 0;
    /// Number of leading rows that are missing in at least one output.
    virtual std::size_t warmup() const = 0;
    virtual std::vector<std::vector<double>> compute(const ingest::PriceSeries& series) const = 0;
};

using IndicatorFactory = std::function<std::unique_ptr<Indicator>(const ParamSet&)>;

struct RegistryEntry {
    std::string name;
    Params defaults;
    IndicatorFactory make;
};

class Registry {
public:
    /// Registry preloaded with every native indicator.
    static Registry with_natives();

    /// Throws ConflictError when `name` is taken.
    void register_indicator(std::string name, Params defaults, IndicatorFactory make);

    bool contains(std::string_view name) const;
    /// Throws UnknownIndicatorError.
    const RegistryEntry& at(std::string_view name) const;
    std::vector<std::string> names() const;

    ParamSet resolve(const IndicatorSpec& spec) const;
    std::unique_ptr<Indicator> instantiate(const IndicatorSpec& spec) const;

    /// Group label used for column names: the bare name when every
    /// parameter equals its default, else name_value1_value2...
    std::string label(const IndicatorSpec& spec) const;
    std::vector<std::string> output_columns(const IndicatorSpec& spec) const;

private:
    std::map<std::string, RegistryEntry, std::less<>> entries_;
};

/// Shared immutable registry of native indicators.
const Registry& native_registry();

/// The default experiment roster: every native indicator at its defaults.
std::vector<IndicatorSpec> default_roster();

FeatureFrame compute(const IndicatorSpec& spec, const ingest::PriceSeries& series,
                     const Registry& registry = native_registry());

/// Concatenates per-spec outputs in spec order. Raw OHLCV columns are never
/// part of the result. Throws SchemaError on duplicate column names.
FeatureFrame compute_all(const std::vector<IndicatorSpec>& specs, const ingest::PriceSeries& series,
                         const Registry& registry = native_registry());

/// Drops the leading rows in which any column is missing.
FeatureFrame drop_warmup(const FeatureFrame& frame, std::size_t* dropped = nullptr);

/// Parses `name` or `name(key=value,...)`.
IndicatorSpec parse_spec(std::string_view text);
/// One spec per line; blank lines and `#` comments are skipped.
std::vector<IndicatorSpec> parse_roster(std::istream& in);
std::vector<IndicatorSpec> parse_roster(std::string_view text);
std::vector<IndicatorSpec> load_roster(const std::string& path);

}  // namespace tafs::indicators
