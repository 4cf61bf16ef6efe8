#include "tafs/select.hpp"

#include "common/parallel.hpp"
#include "common/text.hpp"
#include "tafs/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace tafs::select {

using evaluate::Metric;
using json = nlohmann::ordered_json;

std::string_view method_name(Method method) { return method == Method::SFS ? "SFS" : "SBS"; }

Method parse_method(std::string_view name) {
    const auto t = detail::lower(detail::trim(name));
    if (t == "sfs") {
        return Method::SFS;
    }
    if (t == "sbs") {
        return Method::SBS;
    }
    throw ConfigError("unknown selection method '" + std::string(name) + "' (expected SFS or SBS)");
}

CvScore cross_val_score(const Matrix& X, const Vector& y, const regress::RegressorConfig& config, Metric metric,
                        std::size_t folds, bool shuffle, std::uint64_t seed) {
    if (y.size() != X.rows()) {
        throw ShapeError("cross-validation got " + std::to_string(X.rows()) + " rows but " +
                         std::to_string(y.size()) + " targets");
    }
    const auto split = evaluate::make_folds(static_cast<std::size_t>(X.rows()), folds, shuffle, seed);
    CvScore out;
    out.fold_scores = evaluate::fold_scores(config, X, y, split, metric);
    out.fits = split.size();
    double sum = 0.0;
    for (const double s : out.fold_scores) {
        sum += s;
    }
    out.mean = sum / static_cast<double>(out.fold_scores.size());
    return out;
}

CvScore cross_val_score(const windowing::WindowedDataset& data, const regress::RegressorConfig& config, Metric metric,
                        std::size_t folds, bool shuffle, std::uint64_t seed) {
    return cross_val_score(data.X, data.y, config, metric, folds, shuffle, seed);
}

void SelectionConfig::validate() const {
    if (cv_folds < 2) {
        throw ConfigError("cv_folds must be at least 2, got " + std::to_string(cv_folds));
    }
    if (max_steps < 1) {
        throw ConfigError("max_steps must be at least 1");
    }
    regressor.validate();
}

std::vector<std::string> SelectionResult::labels(std::span<const std::size_t> ids) const {
    std::vector<std::string> out;
    out.reserve(ids.size());
    for (const auto id : ids) {
        out.push_back(groups.at(id));
    }
    return out;
}

namespace {

class Search {
public:
    Search(const windowing::WindowedDataset& data, const SelectionConfig& config)
        : data_(data), config_(config), groups_(data.groups(config.group_by_indicator)) {
        config_.validate();
        if (groups_.size() == 0) {
            throw EmptyInputError("feature selection needs at least one feature group");
        }
        if (data.rows() < config.cv_folds) {
            throw InsufficientSamplesError("feature selection needs at least " + std::to_string(config.cv_folds) +
                                           " samples, got " + std::to_string(data.rows()));
        }
        result_.method = config.method;
        result_.metric = config.metric;
        result_.family = config.regressor.family;
        result_.groups = groups_.labels;
    }

    std::size_t group_count() const { return groups_.size(); }

    double score(std::vector<std::size_t> ids) {
        std::sort(ids.begin(), ids.end());
        const auto cols = groups_.columns_of(ids);
        Matrix X(data_.X.rows(), static_cast<Eigen::Index>(cols.size()));
        for (std::size_t j = 0; j < cols.size(); ++j) {
            X.col(static_cast<Eigen::Index>(j)) = data_.X.col(static_cast<Eigen::Index>(cols[j]));
        }
        const auto cv = cross_val_score(X, data_.y, config_.regressor, config_.metric, config_.cv_folds,
                                        config_.cv_shuffle, config_.seed);
        return cv.mean;
    }

    // Scores every candidate set (possibly concurrently) and returns the
    // index of the best one; ties resolve to the lowest index.
    std::pair<std::size_t, double> best_of(const std::vector<std::vector<std::size_t>>& sets) {
        std::vector<double> scores(sets.size());
        detail::parallel_for(sets.size(), config_.threads, [&](std::size_t i) { scores[i] = score(sets[i]); });
        result_.fits += sets.size() * config_.cv_folds;
        std::size_t best = 0;
        for (std::size_t i = 1; i < scores.size(); ++i) {
            if (evaluate::better(config_.metric, scores[i], scores[best])) {
                best = i;
            }
        }
        return {best, scores[best]};
    }

    SelectionResult& result() { return result_; }
    void count_fits(std::size_t sets) { result_.fits += sets * config_.cv_folds; }

private:
    const windowing::WindowedDataset& data_;
    const SelectionConfig& config_;
    windowing::FeatureGroups groups_;
    SelectionResult result_;
};

}  // namespace

SelectionResult sfs(const windowing::WindowedDataset& data, const SelectionConfig& config) {
    Search search(data, config);
    const auto G = search.group_count();
    std::vector<std::size_t> current;
    std::vector<std::size_t> remaining(G);
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});

    auto& r = search.result();
    const auto steps = std::min(config.max_steps, G);
    for (std::size_t step = 0; step < steps; ++step) {
        std::vector<std::vector<std::size_t>> sets;
        for (const auto g : remaining) {
            auto s = current;
            s.push_back(g);
            sets.push_back(std::move(s));
        }
        const auto [pick, value] = search.best_of(sets);
        const auto g = remaining[pick];
        current.push_back(g);
        remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
        r.trace.push_back({current.size(), g, value});
    }

    r.selected = current;
    std::size_t best = 0;
    for (std::size_t i = 1; i < r.trace.size(); ++i) {
        if (evaluate::better(config.metric, r.trace[i].score, r.trace[best].score)) {
            best = i;
        }
    }
    r.best_score = r.trace[best].score;
    r.best_subset.assign(current.begin(), current.begin() + static_cast<std::ptrdiff_t>(best + 1));
    std::sort(r.best_subset.begin(), r.best_subset.end());
    return std::move(r);
}

SelectionResult sbs(const windowing::WindowedDataset& data, const SelectionConfig& config) {
    Search search(data, config);
    const auto G = search.group_count();
    std::vector<std::size_t> current(G);
    std::iota(current.begin(), current.end(), std::size_t{0});

    auto& r = search.result();
    r.initial_score = search.score(current);
    search.count_fits(1);
    r.best_score = r.initial_score;
    r.best_subset = current;

    std::vector<std::size_t> removed;
    const auto steps = std::min(config.max_steps, G - 1);
    for (std::size_t step = 0; step < steps; ++step) {
        std::vector<std::vector<std::size_t>> sets;
        for (std::size_t i = 0; i < current.size(); ++i) {
            auto s = current;
            s.erase(s.begin() + static_cast<std::ptrdiff_t>(i));
            sets.push_back(std::move(s));
        }
        const auto [pick, value] = search.best_of(sets);
        const auto g = current[pick];
        current.erase(current.begin() + static_cast<std::ptrdiff_t>(pick));
        removed.push_back(g);
        r.trace.push_back({current.size(), g, value});
        // Later states are smaller, so an equal score moves the best forward.
        if (!evaluate::better(config.metric, r.best_score, value)) {
            r.best_score = value;
            r.best_subset = current;
        }
    }
    r.selected = current;
    r.selected.insert(r.selected.end(), removed.rbegin(), removed.rend());
    return std::move(r);
}

SelectionResult run_selection(const windowing::WindowedDataset& data, const SelectionConfig& config) {
    return config.method == Method::SFS ? sfs(data, config) : sbs(data, config);
}

std::vector<CensusRow> top_indicator_census(std::span<const SelectionResult> results) {
    if (results.empty()) {
        throw EmptyInputError("census needs at least one selection result");
    }
    std::map<std::string, std::size_t> counts;
    for (const auto& r : results) {
        for (const auto& g : r.groups) {
            counts.emplace(g, 0);
        }
        for (const auto& g : r.labels(r.best_subset)) {
            ++counts[g];
        }
    }
    std::vector<CensusRow> rows;
    for (const auto& [group, count] : counts) {
        rows.push_back({group, count, 100.0 * static_cast<double>(count) / static_cast<double>(results.size())});
    }
    std::stable_sort(rows.begin(), rows.end(), [](const CensusRow& a, const CensusRow& b) { return a.count > b.count; });
    return rows;
}

namespace {

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

}  // namespace

std::string to_json(const SelectionResult& r) {
    json trace = json::array();
    for (const auto& s : r.trace) {
        trace.push_back(json{{"set_size", s.set_size},
                             {"candidate", r.groups.at(s.candidate)},
                             {"candidate_id", s.candidate},
                             {"score", number_or_null(s.score)}});
    }
    json j;
    j["method"] = method_name(r.method);
    j["metric"] = evaluate::metric_name(r.metric);
    j["regressor"] = regress::family_name(r.family);
    j["groups"] = r.groups;
    j["selected"] = r.labels(r.selected);
    j["selected_ids"] = r.selected;
    j["trace"] = std::move(trace);
    j["initial_score"] = number_or_null(r.initial_score);
    j["best_score"] = number_or_null(r.best_score);
    j["best_subset"] = r.labels(r.best_subset);
    j["best_subset_ids"] = r.best_subset;
    j["fits"] = r.fits;
    return j.dump(2) + "\n";
}

SelectionResult from_json(std::string_view text) {
    try {
        const auto j = json::parse(text);
        SelectionResult r;
        r.method = parse_method(j.at("method").get<std::string>());
        r.metric = evaluate::parse_metric(j.at("metric").get<std::string>());
        r.family = regress::parse_family(j.at("regressor").get<std::string>());
        r.groups = j.at("groups").get<std::vector<std::string>>();
        r.selected = j.at("selected_ids").get<std::vector<std::size_t>>();
        for (const auto& s : j.at("trace")) {
            r.trace.push_back(
                {s.at("set_size").get<std::size_t>(), s.at("candidate_id").get<std::size_t>(), number_from(s.at("score"))});
        }
        r.initial_score = number_from(j.at("initial_score"));
        r.best_score = number_from(j.at("best_score"));
        r.best_subset = j.at("best_subset_ids").get<std::vector<std::size_t>>();
        r.fits = j.at("fits").get<std::size_t>();
        const auto check = [&](std::span<const std::size_t> ids) {
            for (const auto id : ids) {
                if (id >= r.groups.size()) {
                    throw SchemaError("selection result refers to group id " + std::to_string(id) +
                                      " beyond its group list");
                }
            }
        };
        check(r.selected);
        check(r.best_subset);
        for (const auto& s : r.trace) {
            check(std::span<const std::size_t>(&s.candidate, 1));
        }
        return r;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed selection result: ") + e.what());
    }
}

void write_selection(const SelectionResult& result, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open '" + path + "' for writing");
    }
    out << to_json(result);
    if (!out) {
        throw IoError("failed writing '" + path + "'");
    }
}

SelectionResult read_selection(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

}  // namespace tafs::select
