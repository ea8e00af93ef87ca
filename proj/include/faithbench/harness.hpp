#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "faithbench/attribution.hpp"
#include "faithbench/metrics.hpp"
#include "faithbench/rank.hpp"
#include "faithbench/tda.hpp"

namespace faithbench {

struct DatasetSource {
    // Either a synthetic spec or a CSV + schema pair.
    std::optional<SyntheticSpec> synthetic;
    std::filesystem::path csv;
    std::filesystem::path schema;
    std::string label_column = "label";
    std::string name = "synthetic";
    int inject_random = 0;  // sanity-check columns appended after standardization
};

struct TdaSettings {
    double gain = 0.4;
    int histogram_bins = 10;
    std::vector<int> resolution_grid = default_resolution_grid();
    int bootstraps = 30;
    std::optional<int> resolution;  // pinned resolution skips the grid search
};

struct ExperimentConfig {
    DatasetSource dataset;
    std::vector<ArchTag> architectures = {ArchTag::linear, ArchTag::dense3};
    std::vector<MethodId> methods;
    std::vector<BaselineKind> baselines = {BaselineKind::constant_median, BaselineKind::training,
                                           BaselineKind::opposite_class,
                                           BaselineKind::nearest_neighbors};
    int repeats = 3;
    int baseline_k = 5;
    TrainConfig train;
    IGConfig ig;
    KernelShapConfig kernel_shap;
    PerturbSpec perturb;
    PgiConfig pgi;
    std::vector<int> pgi_sweep_ks;  // empty: no sweep emission
    AblationConfig ablation;
    TdaSettings tda;
    std::vector<CorrelationKind> correlations = {CorrelationKind::spearman,
                                                 CorrelationKind::kendall,
                                                 CorrelationKind::weighted_kendall};
    std::filesystem::path import_dir;
    std::filesystem::path out_dir = "out";
    uint64_t master_seed = 0;
    int workers = 0;  // 0: FAITHBENCH_WORKERS or hardware concurrency

    std::vector<double> permutation_fractions = {0.0, 0.25, 0.5, 0.75, 1.0};

    static ExperimentConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    // Stable hash of the canonical serialization (out_dir excluded, so two
    // runs into different directories share a fingerprint).
    std::string fingerprint() const;
    void validate() const;
};

struct PermutationExperiment {
    std::vector<double> fractions = {0.0, 0.25, 0.5, 0.75, 1.0};
    int repeats = 3;
    uint64_t seed = 0;

    void validate() const;
};

// fraction * n rows chosen without replacement and cyclically shifted among
// themselves, so every chosen row moves (when more than one is chosen).
AttributionTable permute_rows(const AttributionTable& table, double fraction, uint64_t seed);

struct PermutationResultRow {
    double fraction = 0.0;
    int repeat = 0;
    std::string metric;
    double value = 0.0;
};

// The ground-truth dose-response experiment: synthetic data, logistic model,
// ground-truth explanations with a growing share of permuted rows; PGI, ABC
// and BND per (fraction, repeat). BND compares each permuted diagram against
// the unpermuted one.
std::vector<PermutationResultRow> run_permutation_experiment(const ExperimentConfig& cfg,
                                                             const PermutationExperiment& exp);

enum class CellStatus { computed, skipped, failed };

struct CellResult {
    std::string id;
    CellStatus status = CellStatus::computed;
    std::string message;
};

struct GridResult {
    std::vector<CellResult> cells;
    std::vector<std::string> anomalies;
    bool any_failed() const;
};

// Full pipeline: data -> models -> attribution grids -> metric scores -> TDA
// -> rankings/agreement -> report files. Cells whose outputs exist with a
// matching fingerprint are skipped; failures are isolated per cell.
GridResult run_grid(const ExperimentConfig& cfg);

// Command entry points shared by the C API; each validates its config and
// writes into cfg.out_dir.
void cmd_synth(const ExperimentConfig& cfg);
void cmd_train(const ExperimentConfig& cfg);
void cmd_explain(const ExperimentConfig& cfg);
void cmd_score(const ExperimentConfig& cfg);
void cmd_tda(const ExperimentConfig& cfg);
void cmd_rank(const ExperimentConfig& cfg);
void cmd_permute_exp(const ExperimentConfig& cfg);
GridResult cmd_grid(const ExperimentConfig& cfg);
void cmd_report(const ExperimentConfig& cfg);

}  // namespace faithbench
