#pragma once

#include "tafs/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tafs::regress {

enum class Family : std::uint8_t { LR, Ridge, Lasso, DTR, KNN, MLP, SVR, ADA, GBR, RFR };

/// All ten families in canonical order.
std::span<const Family> all_families();
/// Upper-case short name: "LR", "Ridge", "Lasso", "DTR", ...
std::string_view family_name(Family family);
/// Case-insensitive; throws ConfigError.
Family parse_family(std::string_view name);

/// Hyperparameter record for one estimator. Values are kept as text so the
/// same record round-trips through config files and grid definitions; each
/// family parses and range-checks its own keys in validate() and fit().
struct RegressorConfig {
    Family family = Family::LR;
    std::map<std::string, std::string, std::less<>> params;
    std::uint64_t seed = 0;

    RegressorConfig& set(const std::string& key, double value);
    RegressorConfig& set(const std::string& key, std::string value);

    /// Throws ConfigError on unknown keys or out-of-range values.
    void validate() const;

    /// Tuned hyperparameters reported for the stock-price experiments.
    static RegressorConfig tuned(Family family, std::uint64_t seed = 0);

    /// Copy with every ensemble size capped at `cap`.
    RegressorConfig fast(std::size_t cap = 50) const;
};

struct FitInfo {
    std::size_t iterations = 0;
    bool converged = true;
    std::vector<std::string> warnings;
    /// Objective value per solver iteration/sweep where the solver has one
    /// (Lasso, MLP); first entry is the value at initialisation.
    std::vector<double> objective_trace;
};

/// A fitted estimator. Immutable after fit; predict is reentrant.
class RegressorModel {
public:
    RegressorModel(Family family, std::size_t n_features, FitInfo info)
        : family_(family), n_features_(n_features), info_(std::move(info)) {}
    virtual ~RegressorModel() = default;

    Family family() const { return family_; }
    std::size_t n_features() const { return n_features_; }
    const FitInfo& info() const { return info_; }

    /// Throws ShapeError unless X has n_features() columns.
    Vector predict(const Matrix& X) const;

    /// Versioned binary artifact.
    void save(std::ostream& out) const;
    static std::unique_ptr<RegressorModel> load(std::istream& in);

protected:
    virtual Vector predict_rows(const Matrix& X) const = 0;
    virtual void save_payload(std::ostream& out) const = 0;

private:
    Family family_;
    std::size_t n_features_;
    FitInfo info_;
};

/// Fits the configured family. Throws NumericInputError on non-finite input,
/// ShapeError on mismatched sizes and InsufficientSamplesError when m < 2.
/// Solver non-convergence is reported through FitInfo, not thrown.
std::unique_ptr<RegressorModel> fit(const RegressorConfig& config, const Matrix& X, const Vector& y);

/// Number of fit() calls made by this process so far, failed ones included.
std::uint64_t fit_call_count();

void save_model(const RegressorModel& model, const std::string& path);
std::unique_ptr<RegressorModel> load_model(const std::string& path);

/// Format version byte embedded in saved models.
inline constexpr std::uint8_t kModelFormatVersion = 1;

}  // namespace tafs::regress
