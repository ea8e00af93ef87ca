#include "faithbench/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "faithbench/rng.hpp"

namespace faithbench {

namespace {

// Applies one draw of the perturbation process with an explicit seed.
Eigen::VectorXd perturb_one(const Eigen::VectorXd& x, const TopKMask& mask,
                            const PerturbSpec& spec, const Dataset& ds, uint64_t seed) {
    Eigen::VectorXd out = x;
    Rng rng(seed);
    const auto train = ds.train_indices();
    const auto groups = ds.schema.one_hot_groups();

    // A group flips at most once per draw even if several members are selected.
    std::set<int> flipped_groups;

    auto flip_group = [&](const std::vector<int>& cols) {
        if (spec.flip_prob == 0.0) return;
        if (spec.flip_prob < 1.0 && rng.uniform() >= spec.flip_prob) return;
        size_t current = 0;
        for (size_t g = 0; g < cols.size(); ++g) {
            if (out(cols[g]) == 1.0) {
                current = g;
                break;
            }
        }
        // Uniform over the other categories.
        size_t next = static_cast<size_t>(rng.below(cols.size() - 1));
        if (next >= current) ++next;
        for (size_t g = 0; g < cols.size(); ++g) out(cols[g]) = g == next ? 1.0 : 0.0;
    };

    auto flip_categorical = [&](int col) {
        const int cardinality = ds.schema.columns[static_cast<size_t>(col)].cardinality;
        if (spec.flip_prob == 0.0) return;
        if (spec.flip_prob < 1.0 && rng.uniform() >= spec.flip_prob) return;
        const auto current = static_cast<int64_t>(out(col));
        int64_t next = static_cast<int64_t>(rng.below(static_cast<uint64_t>(cardinality - 1)));
        if (next >= current) ++next;
        out(col) = static_cast<double>(next);
    };

    auto perturb_numeric = [&](int col) {
        if (spec.numeric_mode == NumericMode::gaussian) {
            if (spec.sigma > 0.0) out(col) = x(col) + spec.sigma * rng.normal();
        } else {
            require(!train.empty(), ErrorCode::invalid_argument,
                    "marginal perturbation needs train rows");
            const size_t pick = static_cast<size_t>(rng.below(train.size()));
            out(col) = ds.X(static_cast<Eigen::Index>(train[pick]), col);
        }
    };

    for (const auto& unit : mask.selected) {
        if (unit.is_group) {
            const auto g = ds.schema.group_of(unit.cols[0]);
            if (g && !flipped_groups.insert(*g).second) continue;
            flip_group(unit.cols);
            continue;
        }
        const int col = unit.cols[0];
        const auto kind = ds.schema.columns[static_cast<size_t>(col)].kind;
        if (kind == ColumnKind::numeric) {
            perturb_numeric(col);
        } else if (kind == ColumnKind::categorical) {
            flip_categorical(col);
        } else {
            // A selected one-hot member perturbs its whole group, once.
            const auto g = ds.schema.group_of(col);
            if (g && flipped_groups.insert(*g).second) flip_group(groups[static_cast<size_t>(*g)]);
        }
    }
    return out;
}

}  // namespace

void PerturbSpec::validate() const {
    require(sigma >= 0.0, ErrorCode::invalid_argument, "sigma must be non-negative");
    require(flip_prob >= 0.0 && flip_prob <= 1.0, ErrorCode::invalid_argument,
            "flip_prob must lie in [0, 1]");
}

std::vector<PerturbUnit> perturb_units(const FeatureSchema& schema, bool aggregate_one_hot) {
    std::vector<PerturbUnit> units;
    if (!aggregate_one_hot) {
        for (size_t j = 0; j < schema.size(); ++j) units.push_back({{static_cast<int>(j)}, false});
        return units;
    }
    std::vector<bool> grouped(schema.size(), false);
    std::vector<std::pair<int, PerturbUnit>> ordered;  // keyed by first column
    for (const auto& group : schema.one_hot_groups()) {
        for (int c : group) grouped[static_cast<size_t>(c)] = true;
        ordered.push_back({group[0], {group, true}});
    }
    for (size_t j = 0; j < schema.size(); ++j)
        if (!grouped[j]) ordered.push_back({static_cast<int>(j), {{static_cast<int>(j)}, false}});
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [first, unit] : ordered) units.push_back(std::move(unit));
    return units;
}

TopKMask top_k_mask(const Eigen::VectorXd& attribution_row, const FeatureSchema& schema,
                    int k, bool aggregate_categorical) {
    require(k >= 1, ErrorCode::invalid_argument, "k must be positive");
    require(static_cast<size_t>(attribution_row.size()) == schema.size(), ErrorCode::shape,
            "attribution row does not match schema width");

    const auto units = perturb_units(schema, aggregate_categorical);
    std::vector<std::pair<double, size_t>> scored;  // (-score, unit) for descending sort
    scored.reserve(units.size());
    for (size_t u = 0; u < units.size(); ++u) {
        double score = 0.0;
        for (int c : units[u].cols) score += std::abs(attribution_row(c));
        scored.emplace_back(-score, u);
    }
    // Descending |score|, ties by lower first-column index (unit order).
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    TopKMask mask;
    mask.k = std::min<int>(k, static_cast<int>(units.size()));
    for (int i = 0; i < mask.k; ++i) mask.selected.push_back(units[scored[static_cast<size_t>(i)].second]);
    return mask;
}

Eigen::VectorXd perturb(const Eigen::VectorXd& x, const TopKMask& mask,
                        const PerturbSpec& spec, const Dataset& ds) {
    spec.validate();
    return perturb_one(x, mask, spec, ds, derive_seed(spec.seed, "run", 0));
}

Eigen::MatrixXd perturb_batch(const Eigen::VectorXd& x, const TopKMask& mask,
                              const PerturbSpec& spec, const Dataset& ds, int m) {
    spec.validate();
    require(m >= 1, ErrorCode::invalid_argument, "perturb_batch needs m >= 1");
    Eigen::MatrixXd out(m, x.size());
    for (int run = 0; run < m; ++run)
        out.row(run) = perturb_one(x, mask, spec, ds, derive_seed(spec.seed, "run", static_cast<uint64_t>(run)));
    return out;
}

}  // namespace faithbench
