#pragma once

#include "tafs/evaluate.hpp"
#include "tafs/regress.hpp"
#include "tafs/windowing.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tafs::select {

enum class Method : std::uint8_t { SFS, SBS };

std::string_view method_name(Method method);
/// Case-insensitive "sfs" / "sbs"; throws ConfigError.
Method parse_method(std::string_view name);

struct CvScore {
    double mean = 0.0;
    std::vector<double> fold_scores;
    std::size_t fits = 0;
};

/// Mean fold score of `config` on (X, y). Folds are contiguous unless
/// `shuffle` is set. Throws InsufficientSamplesError when m < folds.
CvScore cross_val_score(const Matrix& X, const Vector& y, const regress::RegressorConfig& config,
                        evaluate::Metric metric, std::size_t folds, bool shuffle = false, std::uint64_t seed = 0);
CvScore cross_val_score(const windowing::WindowedDataset& data, const regress::RegressorConfig& config,
                        evaluate::Metric metric, std::size_t folds, bool shuffle = false, std::uint64_t seed = 0);

struct SelectionConfig {
    Method method = Method::SFS;
    regress::RegressorConfig regressor;
    evaluate::Metric metric = evaluate::Metric::MSE;
    std::size_t cv_folds = 5;
    bool cv_shuffle = false;
    bool group_by_indicator = true;
    /// Greedy steps to take; the default runs the full path.
    std::size_t max_steps = std::numeric_limits<std::size_t>::max();
    std::uint64_t seed = 0;  // fold shuffling only
    std::size_t threads = 1;

    /// Throws ConfigError unless cv_folds >= 2 and max_steps >= 1.
    void validate() const;
};

struct TraceStep {
    std::size_t set_size = 0;   // groups in the set after this step
    std::size_t candidate = 0;  // group added (SFS) or removed (SBS)
    double score = 0.0;
};

struct SelectionResult {
    Method method = Method::SFS;
    evaluate::Metric metric = evaluate::Metric::MSE;
    regress::Family family = regress::Family::LR;
    /// Labels of every selectable group, indexed by group id.
    std::vector<std::string> groups;
    /// SFS: groups in the order they were added. SBS: the survivors followed
    /// by the removed groups, last removed first.
    std::vector<std::size_t> selected;
    std::vector<TraceStep> trace;
    /// SBS only: score of the full starting set (NaN for SFS).
    double initial_score = std::numeric_limits<double>::quiet_NaN();
    double best_score = std::numeric_limits<double>::quiet_NaN();
    /// Best recorded set in ascending group order. Ties go to the smaller set.
    std::vector<std::size_t> best_subset;
    std::size_t fits = 0;

    std::vector<std::string> labels(std::span<const std::size_t> ids) const;
};

/// Greedy forward search: each step adds the group whose addition scores
/// best, ties to the lowest group id.
SelectionResult sfs(const windowing::WindowedDataset& data, const SelectionConfig& config);
/// Greedy backward search from the full set down to one group.
SelectionResult sbs(const windowing::WindowedDataset& data, const SelectionConfig& config);
SelectionResult run_selection(const windowing::WindowedDataset& data, const SelectionConfig& config);

struct CensusRow {
    std::string group;
    std::size_t count = 0;
    double percent = 0.0;
};

/// Share of results whose best_subset contains each group, sorted by
/// descending percentage then label. Throws EmptyInputError on no results.
std::vector<CensusRow> top_indicator_census(std::span<const SelectionResult> results);

std::string to_json(const SelectionResult& result);
SelectionResult from_json(std::string_view text);
void write_selection(const SelectionResult& result, const std::string& path);
SelectionResult read_selection(const std::string& path);

}  // namespace tafs::select
