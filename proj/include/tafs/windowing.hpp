#pragma once

#include "tafs/date.hpp"
#include "tafs/feature_frame.hpp"
#include "tafs/ingest.hpp"
#include "tafs/linalg.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace tafs::windowing {

struct WindowSpec {
    std::size_t window = 3;   // days per sample
    std::size_t horizon = 3;  // days after the window's last day at which the target is read

    void validate() const;
};

/// Selectable feature units: either every lag column of one indicator
/// (group_by_indicator) or each column on its own.
struct FeatureGroups {
    std::vector<std::string> labels;
    std::vector<std::vector<std::size_t>> columns;

    std::size_t size() const { return labels.size(); }
    /// Sorted union of the columns of the given groups.
    std::vector<std::size_t> columns_of(std::span<const std::size_t> group_ids) const;
    /// Index of a label, or size() when absent.
    std::size_t find(std::string_view label) const;
};

/// Flattened supervised dataset. Column f*w + lag holds frame column f on
/// the day `lag` days before the window's last day, named `<column>@<lag>`.
struct WindowedDataset {
    Matrix X;
    Vector y;
    std::vector<std::string> feature_names;
    std::vector<Date> sample_dates;  // last in-window date per row (empty when read from CSV)
    std::vector<Date> target_dates;  // date the target was read from (empty when read from CSV)

    std::size_t rows() const { return static_cast<std::size_t>(X.rows()); }
    std::size_t cols() const { return static_cast<std::size_t>(X.cols()); }

    FeatureGroups groups(bool by_indicator = true) const;
    WindowedDataset select_columns(std::span<const std::size_t> cols) const;
    WindowedDataset slice_rows(std::size_t first, std::size_t last) const;
};

/// Close prices on the frame's dates. ReferenceError when a frame date is
/// absent from the series.
std::vector<double> align_targets(const FeatureFrame& frame, const ingest::PriceSeries& series);

/// Row i covers frame days i..i+w-1 and targets[i+w-1+h]; n-w-h+1 rows.
WindowedDataset make_windows(const FeatureFrame& frame, std::span<const double> targets, const WindowSpec& spec);

std::vector<WindowedDataset> window_size_sweep(const FeatureFrame& frame, std::span<const double> targets,
                                               std::span<const std::size_t> sizes, std::size_t horizon);

/// Header = feature names + `target`.
void write_dataset_csv(const WindowedDataset& data, std::ostream& out);
void write_dataset_csv(const WindowedDataset& data, const std::string& path);
WindowedDataset read_dataset_csv(std::istream& in);
WindowedDataset read_dataset_csv(const std::string& path);

}  // namespace tafs::windowing
