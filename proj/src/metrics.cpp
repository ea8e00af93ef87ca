#include "faithbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "faithbench/rng.hpp"

namespace faithbench {

namespace {

// Test rows to evaluate, capped at cfg.max_samples with a seeded subsample.
std::vector<size_t> evaluation_rows(const Dataset& ds, size_t max_samples, uint64_t seed) {
    auto rows = ds.test_indices();
    require(!rows.empty(), ErrorCode::invalid_argument, "test split is empty");
    if (max_samples > 0 && rows.size() > max_samples) {
        Rng rng(derive_seed(seed, "subsample"));
        auto picks = rng.sample_without_replacement(rows.size(), max_samples);
        std::sort(picks.begin(), picks.end());
        std::vector<size_t> subset;
        subset.reserve(max_samples);
        for (size_t p : picks) subset.push_back(rows[p]);
        rows = std::move(subset);
    }
    return rows;
}

int effective_k(int requested, size_t unit_count) {
    if (requested > 0) return requested;
    return std::max(1, static_cast<int>(std::lround(0.25 * static_cast<double>(unit_count))));
}

void check_table(const Dataset& ds, const AttributionTable& table) {
    require(static_cast<size_t>(table.values.rows()) == ds.rows() &&
                static_cast<size_t>(table.values.cols()) == ds.cols(),
            ErrorCode::shape, "attribution table does not match the dataset dimensions");
}

}  // namespace

std::string metric_kind_name(MetricKind kind) {
    switch (kind) {
        case MetricKind::pgi: return "PGI";
        case MetricKind::abc: return "ABC";
        case MetricKind::bnd: return "BND";
    }
    return "PGI";
}

Direction metric_direction(MetricKind kind) {
    return kind == MetricKind::pgi ? Direction::higher_better : Direction::lower_better;
}

TableKey table_key(const AttributionTable& table) {
    return {table.method.name(), table.baseline_name(), table.repeat};
}

double auroc(const Eigen::VectorXd& scores, const std::vector<int>& labels,
             const std::vector<size_t>& indices) {
    require(!indices.empty(), ErrorCode::invalid_argument, "auroc over an empty index set");
    size_t positives = 0;
    for (size_t pos = 0; pos < indices.size(); ++pos)
        positives += static_cast<size_t>(labels[indices[pos]] == 1);
    const size_t negatives = indices.size() - positives;
    require(positives > 0 && negatives > 0, ErrorCode::numeric,
            "AUROC undefined: test split contains a single class");

    // Rank-sum with average ranks for tied scores.
    std::vector<size_t> order(indices.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return scores(static_cast<Eigen::Index>(a)) < scores(static_cast<Eigen::Index>(b));
    });

    double positive_rank_sum = 0.0;
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j < order.size() &&
               scores(static_cast<Eigen::Index>(order[j])) ==
                   scores(static_cast<Eigen::Index>(order[i])))
            ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based average
        for (size_t t = i; t < j; ++t)
            if (labels[indices[order[t]]] == 1) positive_rank_sum += avg_rank;
        i = j;
    }
    const double n_pos = static_cast<double>(positives);
    const double n_neg = static_cast<double>(negatives);
    return (positive_rank_sum - n_pos * (n_pos + 1.0) / 2.0) / (n_pos * n_neg);
}

MetricScore pgi(const DenseModel& model, const Dataset& ds, const AttributionTable& table,
                const PerturbSpec& spec, const PgiConfig& cfg) {
    check_table(ds, table);
    require(cfg.m >= 1, ErrorCode::invalid_argument, "pgi needs m >= 1");

    const auto units = perturb_units(ds.schema, cfg.aggregate_categorical);
    const int k = effective_k(cfg.k, units.size());
    require(k <= static_cast<int>(units.size()), ErrorCode::invalid_argument,
            "pgi k exceeds the number of selectable units");

    const auto rows = evaluation_rows(ds, cfg.max_samples, cfg.seed);
    double total = 0.0;
    for (size_t row : rows) {
        const Eigen::VectorXd x = ds.X.row(static_cast<Eigen::Index>(row));
        const double fx = model.predict(x);
        const TopKMask mask = top_k_mask(table.values.row(static_cast<Eigen::Index>(row)),
                                         ds.schema, k, cfg.aggregate_categorical);
        PerturbSpec row_spec = spec;
        row_spec.seed = derive_seed(spec.seed, "pgi-row", static_cast<uint64_t>(row));
        const Eigen::MatrixXd perturbed = perturb_batch(x, mask, row_spec, ds, cfg.m);
        const Eigen::VectorXd probs = model.predict_batch(perturbed);
        double gap = 0.0;
        for (Eigen::Index j = 0; j < probs.size(); ++j) gap += std::abs(fx - probs(j));
        total += gap / static_cast<double>(cfg.m);
    }

    MetricScore score;
    score.metric = MetricKind::pgi;
    score.direction = Direction::higher_better;
    score.value = total / static_cast<double>(rows.size());
    score.table = table_key(table);
    return score;
}

std::vector<std::pair<int, MetricScore>> pgi_sweep(const DenseModel& model, const Dataset& ds,
                                                   const AttributionTable& table,
                                                   const PerturbSpec& spec,
                                                   const std::vector<int>& k_values,
                                                   const PgiConfig& cfg) {
    require(!k_values.empty(), ErrorCode::invalid_argument, "pgi_sweep needs at least one k");
    std::vector<std::pair<int, MetricScore>> out;
    out.reserve(k_values.size());
    for (int k : k_values) {
        PgiConfig point = cfg;
        point.k = k;  // shared spec.seed keeps the per-row perturbation streams aligned
        out.emplace_back(k, pgi(model, ds, table, spec, point));
    }
    return out;
}

double normalized_curve_area(const std::vector<double>& performance) {
    require(performance.size() >= 2, ErrorCode::invalid_argument,
            "curve needs at least two points");
    double area = 0.0;
    for (size_t s = 1; s < performance.size(); ++s)
        area += 0.5 * (performance[s - 1] + performance[s]);
    return area / static_cast<double>(performance.size() - 1);
}

AblationCurve ablation_curve(const DenseModel& model, const Dataset& ds,
                             const AttributionTable& table, const PerturbSpec& spec,
                             const AblationConfig& cfg) {
    check_table(ds, table);
    const auto test_rows = ds.test_indices();
    require(!test_rows.empty(), ErrorCode::invalid_argument, "test split is empty");

    const auto units = perturb_units(ds.schema, cfg.aggregate_categorical);
    const size_t n_units = units.size();
    const size_t n_rows = test_rows.size();

    // Per-row ablation order: either one global order from the mean
    // |attribution| over test rows, or each row's own order.
    std::vector<std::vector<size_t>> row_order(n_rows);
    if (cfg.per_row) {
        for (size_t r = 0; r < n_rows; ++r) {
            std::vector<std::pair<double, size_t>> scored(n_units);
            for (size_t u = 0; u < n_units; ++u) {
                double score = 0.0;
                for (int c : units[u].cols)
                    score += std::abs(table.values(static_cast<Eigen::Index>(test_rows[r]), c));
                scored[u] = {-score, u};
            }
            std::stable_sort(scored.begin(), scored.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            row_order[r].resize(n_units);
            for (size_t u = 0; u < n_units; ++u) row_order[r][u] = scored[u].second;
        }
    } else {
        std::vector<std::pair<double, size_t>> scored(n_units);
        for (size_t u = 0; u < n_units; ++u) {
            double score = 0.0;
            for (size_t r = 0; r < n_rows; ++r)
                for (int c : units[u].cols)
                    score += std::abs(table.values(static_cast<Eigen::Index>(test_rows[r]), c));
            scored[u] = {-score / static_cast<double>(n_rows), u};
        }
        std::stable_sort(scored.begin(), scored.end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<size_t> order(n_units);
        for (size_t u = 0; u < n_units; ++u) order[u] = scored[u].second;
        for (size_t r = 0; r < n_rows; ++r) row_order[r] = order;
    }

    Eigen::MatrixXd current(static_cast<Eigen::Index>(n_rows), ds.X.cols());
    for (size_t r = 0; r < n_rows; ++r)
        current.row(static_cast<Eigen::Index>(r)) = ds.X.row(static_cast<Eigen::Index>(test_rows[r]));

    AblationCurve curve;
    curve.steps.push_back(0);
    curve.performance.push_back(auroc(model.predict_batch(current), ds.y, test_rows));

    // Draw seeds key on (row, unit), not on the step: a unit's perturbed
    // value is the same wherever it appears in the order, so two orders that
    // have ablated the same set produce identical rows and curves differ only
    // through genuine ordering quality.
    auto apply_unit = [&](size_t r, size_t unit_index) {
        TopKMask mask;
        mask.k = 1;
        mask.selected.push_back(units[unit_index]);
        PerturbSpec unit_spec = spec;
        unit_spec.seed = derive_seed(spec.seed, "ablation",
                                     unit_index * 1000003 + test_rows[r]);
        current.row(static_cast<Eigen::Index>(r)) =
            perturb(current.row(static_cast<Eigen::Index>(r)).transpose(), mask, unit_spec, ds)
                .transpose();
    };

    for (size_t step = 1; step <= n_units; ++step) {
        for (size_t r = 0; r < n_rows; ++r) {
            if (cfg.cumulative) {
                // Only the newly ablated unit is perturbed on top of the
                // previous state.
                apply_unit(r, row_order[r][step - 1]);
            } else {
                current.row(static_cast<Eigen::Index>(r)) =
                    ds.X.row(static_cast<Eigen::Index>(test_rows[r]));
                for (size_t s = 0; s < step; ++s) apply_unit(r, row_order[r][s]);
            }
        }
        curve.steps.push_back(static_cast<int>(step));
        curve.performance.push_back(auroc(model.predict_batch(current), ds.y, test_rows));
    }

    curve.auc = normalized_curve_area(curve.performance);
    return curve;
}

MetricScore abc(const AblationCurve& curve, const TableKey& key) {
    MetricScore score;
    score.metric = MetricKind::abc;
    score.direction = Direction::lower_better;
    score.value = curve.auc;
    score.table = key;
    return score;
}

double random_feature_cutoff(const std::vector<AttributionTable>& tables, const Dataset& ds) {
    const auto injected = ds.random_feature_columns();
    require(!injected.empty(), ErrorCode::invalid_argument,
            "dataset has no injected __rnd_ features");
    require(!tables.empty(), ErrorCode::invalid_argument, "no attribution tables supplied");

    const auto test_rows = ds.test_indices();
    require(!test_rows.empty(), ErrorCode::invalid_argument, "test split is empty");

    const size_t d = ds.cols();
    std::vector<double> rank_sum(injected.size(), 0.0);
    size_t observations = 0;

    for (const auto& table : tables) {
        check_table(ds, table);
        for (size_t row : test_rows) {
            // 1-based rank by descending |attribution|, ties to the lower index.
            std::vector<std::pair<double, size_t>> scored(d);
            for (size_t j = 0; j < d; ++j)
                scored[j] = {-std::abs(table.values(static_cast<Eigen::Index>(row),
                                                    static_cast<Eigen::Index>(j))),
                             j};
            std::stable_sort(scored.begin(), scored.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            std::vector<size_t> rank_of(d);
            for (size_t pos = 0; pos < d; ++pos) rank_of[scored[pos].second] = pos + 1;
            for (size_t f = 0; f < injected.size(); ++f)
                rank_sum[f] += static_cast<double>(rank_of[static_cast<size_t>(injected[f])]);
            ++observations;
        }
    }

    double best = std::numeric_limits<double>::infinity();
    for (double sum : rank_sum)
        best = std::min(best, sum / static_cast<double>(observations));
    return best;
}

}  // namespace faithbench
