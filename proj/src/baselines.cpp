#include "faithbench/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "faithbench/rng.hpp"

namespace faithbench {

namespace {

double column_median(const Dataset& ds, const std::vector<size_t>& train, int col) {
    std::vector<double> values;
    values.reserve(train.size());
    for (size_t i : train) values.push_back(ds.X(static_cast<Eigen::Index>(i), col));
    std::sort(values.begin(), values.end());
    const size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Most frequent value; ties resolved toward the smaller value.
double column_mode(const Dataset& ds, const std::vector<size_t>& train, int col) {
    std::vector<double> values;
    values.reserve(train.size());
    for (size_t i : train) values.push_back(ds.X(static_cast<Eigen::Index>(i), col));
    std::sort(values.begin(), values.end());
    double best = values[0];
    size_t best_count = 0;
    size_t i = 0;
    while (i < values.size()) {
        size_t j = i;
        while (j < values.size() && values[j] == values[i]) ++j;
        if (j - i > best_count) {
            best_count = j - i;
            best = values[i];
        }
        i = j;
    }
    return best;
}

// (distance, row) pairs for the train rows passing `include`, sorted with
// ties broken by the lower row index.
std::vector<std::pair<double, size_t>> sorted_distances(
    const Dataset& ds, const Eigen::VectorXd& anchor,
    const std::function<bool(size_t)>& include) {
    std::vector<std::pair<double, size_t>> out;
    for (size_t i : ds.train_indices()) {
        if (!include(i)) continue;
        const double dist = (ds.X.row(static_cast<Eigen::Index>(i)).transpose() - anchor).norm();
        out.emplace_back(dist, i);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Eigen::MatrixXd gather_rows(const Dataset& ds, const std::vector<size_t>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), ds.X.cols());
    for (size_t i = 0; i < rows.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = ds.X.row(static_cast<Eigen::Index>(rows[i]));
    return out;
}

}  // namespace

std::string baseline_kind_name(BaselineKind kind) {
    switch (kind) {
        case BaselineKind::constant_median: return "constant-median";
        case BaselineKind::training: return "training";
        case BaselineKind::opposite_class: return "opposite-class";
        case BaselineKind::nearest_neighbors: return "nearest-neighbors";
    }
    return "constant-median";
}

BaselineKind baseline_kind_from_name(const std::string& name) {
    if (name == "constant-median") return BaselineKind::constant_median;
    if (name == "training") return BaselineKind::training;
    if (name == "opposite-class") return BaselineKind::opposite_class;
    if (name == "nearest-neighbors") return BaselineKind::nearest_neighbors;
    raise(ErrorCode::parse, "unknown baseline kind: " + name);
}

BaselineSet constant_median(const Dataset& ds) {
    const auto train = ds.train_indices();
    require(!train.empty(), ErrorCode::invalid_argument, "constant_median needs train rows");

    Eigen::MatrixXd ref(1, ds.X.cols());
    std::vector<bool> done(ds.cols(), false);

    // One-hot groups use the modal indicator vector; per-column medians would
    // break the sum-to-1 invariant.
    for (const auto& group : ds.schema.one_hot_groups()) {
        std::vector<size_t> counts(group.size(), 0);
        for (size_t i : train) {
            for (size_t g = 0; g < group.size(); ++g) {
                if (ds.X(static_cast<Eigen::Index>(i), group[g]) == 1.0) {
                    ++counts[g];
                    break;
                }
            }
        }
        const size_t winner = static_cast<size_t>(
            std::max_element(counts.begin(), counts.end()) - counts.begin());
        for (size_t g = 0; g < group.size(); ++g) {
            ref(0, group[g]) = g == winner ? 1.0 : 0.0;
            done[static_cast<size_t>(group[g])] = true;
        }
    }

    for (size_t j = 0; j < ds.cols(); ++j) {
        if (done[j]) continue;
        const auto kind = ds.schema.columns[j].kind;
        ref(0, static_cast<Eigen::Index>(j)) = kind == ColumnKind::categorical
                                                   ? column_mode(ds, train, static_cast<int>(j))
                                                   : column_median(ds, train, static_cast<int>(j));
    }

    BaselineSet set;
    set.kind = BaselineKind::constant_median;
    set.references = ref;
    return set;
}

BaselineSet training_sample(const Dataset& ds, int k, uint64_t seed) {
    const auto train = ds.train_indices();
    require(k >= 1, ErrorCode::invalid_argument, "k must be positive");
    require(static_cast<size_t>(k) <= train.size(), ErrorCode::invalid_argument,
            "k exceeds the train split size");

    Rng rng(derive_seed(seed, "training-sample"));
    const auto picks = rng.sample_without_replacement(train.size(), static_cast<size_t>(k));
    std::vector<size_t> rows;
    rows.reserve(picks.size());
    for (size_t p : picks) rows.push_back(train[p]);

    BaselineSet set;
    set.kind = BaselineKind::training;
    set.references = gather_rows(ds, rows);
    set.seed = seed;
    return set;
}

BaselineSet opposite_class(const Dataset& ds, const DenseModel& model,
                           const Eigen::VectorXd& anchor, int k, uint64_t seed) {
    const auto train = ds.train_indices();
    std::vector<bool> train_row_class(train.size());
    for (size_t i = 0; i < train.size(); ++i)
        train_row_class[i] =
            model.predict(ds.X.row(static_cast<Eigen::Index>(train[i])).transpose()) >= 0.5;
    return detail::opposite_class_prescored(ds, train_row_class, model.predict(anchor) >= 0.5,
                                            anchor, k, seed);
}

BaselineSet detail::opposite_class_prescored(const Dataset& ds,
                                             const std::vector<bool>& train_row_class,
                                             bool anchor_class, const Eigen::VectorXd& anchor,
                                             int k, uint64_t seed) {
    require(k >= 1, ErrorCode::invalid_argument, "k must be positive");
    const auto train = ds.train_indices();
    require(train_row_class.size() == train.size(), ErrorCode::shape,
            "predicted-class vector does not match the train split");

    std::map<size_t, bool> class_by_row;
    for (size_t i = 0; i < train.size(); ++i) class_by_row[train[i]] = train_row_class[i];

    const auto candidates = sorted_distances(
        ds, anchor, [&](size_t i) { return class_by_row.at(i) != anchor_class; });
    require(!candidates.empty(), ErrorCode::unavailable,
            "no train rows with the opposite predicted class");

    BaselineSet set;
    set.kind = BaselineKind::opposite_class;
    set.anchor = anchor;
    set.seed = seed;
    set.short_set = candidates.size() < static_cast<size_t>(k);
    std::vector<size_t> rows;
    for (size_t i = 0; i < std::min(candidates.size(), static_cast<size_t>(k)); ++i)
        rows.push_back(candidates[i].second);
    set.references = gather_rows(ds, rows);
    return set;
}

BaselineSet nearest_neighbors(const Dataset& ds, const Eigen::VectorXd& anchor, int k,
                              uint64_t seed) {
    require(k >= 1, ErrorCode::invalid_argument, "k must be positive");

    const auto candidates = sorted_distances(ds, anchor, [&](size_t i) {
        return (ds.X.row(static_cast<Eigen::Index>(i)).transpose().array() != anchor.array()).any();
    });
    require(candidates.size() >= static_cast<size_t>(k), ErrorCode::invalid_argument,
            "k exceeds the number of eligible train rows");

    BaselineSet set;
    set.kind = BaselineKind::nearest_neighbors;
    set.anchor = anchor;
    set.seed = seed;
    std::vector<size_t> rows;
    for (int i = 0; i < k; ++i) rows.push_back(candidates[static_cast<size_t>(i)].second);
    set.references = gather_rows(ds, rows);
    return set;
}

}  // namespace faithbench
