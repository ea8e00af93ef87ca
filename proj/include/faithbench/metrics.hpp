#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "faithbench/attribution.hpp"
#include "faithbench/perturb.hpp"

namespace faithbench {

enum class MetricKind { pgi, abc, bnd };
enum class Direction { higher_better, lower_better };

std::string metric_kind_name(MetricKind kind);
Direction metric_direction(MetricKind kind);

struct TableKey {
    std::string method;
    std::string baseline;
    int repeat = 0;

    std::string candidate() const { return method + "|" + baseline; }
};

TableKey table_key(const AttributionTable& table);

struct MetricScore {
    MetricKind metric = MetricKind::pgi;
    double value = 0.0;
    Direction direction = Direction::higher_better;
    TableKey table;
};

// Rank-sum AUROC with average ranks for ties; throws ErrorCode::numeric when
// only one class is present.
double auroc(const Eigen::VectorXd& scores, const std::vector<int>& labels,
             const std::vector<size_t>& indices);

struct PgiConfig {
    int k = 0;                // 0: defaults to max(1, round(0.25 * units))
    int m = 10;               // perturbation runs per sample
    bool aggregate_categorical = false;
    size_t max_samples = 1000;  // test rows beyond this are subsampled
    uint64_t seed = 0;
};

// Mean over evaluated test rows of the mean |f(x) - f(x~)| over m runs, with
// x~ perturbing the sample's top-k units. Higher is more faithful.
MetricScore pgi(const DenseModel& model, const Dataset& ds, const AttributionTable& table,
                const PerturbSpec& spec, const PgiConfig& cfg);

// PGI per k with shared per-sample seeds so the curves are comparable.
std::vector<std::pair<int, MetricScore>> pgi_sweep(const DenseModel& model, const Dataset& ds,
                                                   const AttributionTable& table,
                                                   const PerturbSpec& spec,
                                                   const std::vector<int>& k_values,
                                                   const PgiConfig& cfg);

struct AblationConfig {
    bool aggregate_categorical = true;
    // false: one global order from the mean |attribution| over test rows;
    // true: each row is ablated in its own attribution order.
    bool per_row = false;
    // true: perturbations accumulate across steps; false: each step restarts
    // from the clean input.
    bool cumulative = true;
    uint64_t seed = 0;
};

struct AblationCurve {
    std::vector<int> steps;           // 0..S
    std::vector<double> performance;  // AUROC per step on the test split
    double auc = 0.0;                 // trapezoid over steps, scaled to [0,1]
};

double normalized_curve_area(const std::vector<double>& performance);

AblationCurve ablation_curve(const DenseModel& model, const Dataset& ds,
                             const AttributionTable& table, const PerturbSpec& spec,
                             const AblationConfig& cfg);

// Scalar faithfulness: the curve area; lower (faster degradation) is better.
MetricScore abc(const AblationCurve& curve, const TableKey& key);

// Best (lowest) mean rank of any injected __rnd_ feature, 1-based, over all
// test rows of all tables.
double random_feature_cutoff(const std::vector<AttributionTable>& tables, const Dataset& ds);

}  // namespace faithbench
