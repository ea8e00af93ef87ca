#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "faithbench/baselines.hpp"
#include "faithbench/data.hpp"
#include "faithbench/model.hpp"

namespace faithbench {

struct MethodId {
    enum class Kind { integrated_gradients, kernel_shap, random, ground_truth, imported };

    Kind kind = Kind::integrated_gradients;
    std::string label;  // display name for imported tables, e.g. "deep-shap"

    // Canonical name: "integrated-gradients", "kernel-shap", "random",
    // "ground-truth", or the imported label.
    std::string name() const;
    static MethodId parse(const std::string& name);

    bool operator==(const MethodId& other) const {
        return kind == other.kind && label == other.label;
    }
};

struct AttributionTable {
    Eigen::MatrixXd values;  // row i explains sample i
    MethodId method;
    std::optional<BaselineKind> baseline;
    int repeat = 0;
    uint64_t seed = 0;
    std::string dataset_hash;
    GradientTarget target = GradientTarget::probability;

    std::string baseline_name() const;  // "none" when no baseline applies
};

struct IGConfig {
    int steps = 50;  // midpoint Riemann rule; must be >= 2
};

struct KernelShapConfig {
    int n_coalitions = 2048;  // sampling budget; >= d + 2
    double ridge = 0.0;       // escalated automatically on singular systems
    int full_enumeration_max_dim = 12;  // 2^d <= 4096
    uint64_t seed = 0;
};

// Path-integral attribution with the midpoint rule, averaged over the
// baseline reference rows. Exactly (x - b) .* c for linear models in logit
// space.
Eigen::VectorXd integrated_gradients(const DenseModel& model, const Eigen::VectorXd& x,
                                     const BaselineSet& baselines, const IGConfig& cfg,
                                     GradientTarget target);

// Shapley-kernel weighted least squares over masked coalitions. Masked
// features take baseline values; the value function averages over reference
// rows. Additivity sum(phi) = f(x) - mean_b f(b) holds by construction.
Eigen::VectorXd kernel_shap(const DenseModel& model, const Eigen::VectorXd& x,
                            const BaselineSet& baselines, const KernelShapConfig& cfg,
                            GradientTarget target);

AttributionTable random_explanations(size_t n, size_t d, uint64_t seed);

// values[i][j] = X[i][j] * c_j for a linear model's learned coefficients.
AttributionTable ground_truth_linear(const DenseModel& model, const Dataset& ds);

AttributionTable import_table(const std::filesystem::path& csv_path,
                              const std::filesystem::path& sidecar_path,
                              const Dataset& ds);

void save_table(const AttributionTable& table, const FeatureSchema& schema,
                const std::filesystem::path& csv_path,
                const std::filesystem::path& sidecar_path);

struct GridSpec {
    std::vector<MethodId> methods;        // explicit attribution methods
    std::vector<BaselineKind> baselines;
    int repeats = 3;
    int baseline_k = 5;
    IGConfig ig;
    KernelShapConfig kernel_shap;
    // Imported tables are read from
    // <import_dir>/<label>_<arch>_<baseline>_r<repeat>.csv with a .json
    // sidecar next to each.
    std::filesystem::path import_dir;
    uint64_t master_seed = 0;
};

// One grid cell: a single table for (method, baseline, repeat). Seeds derive
// from spec.master_seed and the cell identity, so per-cell generation and
// generate_grid produce identical tables. baseline is ignored for random and
// ground-truth methods.
AttributionTable generate_table(const Dataset& ds, const DenseModel& model, const GridSpec& spec,
                                const MethodId& method, std::optional<BaselineKind> baseline,
                                int repeat);

// methods x baselines x repeats, plus `repeats` random tables and, for linear
// models, `repeats` ground-truth tables. Gradient targets default to logit
// for linear models and probability for dense3.
std::vector<AttributionTable> generate_grid(const Dataset& ds, const DenseModel& model,
                                            const GridSpec& spec);

}  // namespace faithbench
