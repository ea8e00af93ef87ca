#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "faithbench/data.hpp"

namespace faithbench {

enum class NumericMode { gaussian, marginal };

struct PerturbSpec {
    NumericMode numeric_mode = NumericMode::gaussian;
    double sigma = 0.1;       // std of the additive noise in gaussian mode
    double flip_prob = 0.3;   // per-group Bernoulli for categorical flips
    uint64_t seed = 0;

    void validate() const;
};

// A selectable unit is either a single column or a whole one-hot group.
struct PerturbUnit {
    std::vector<int> cols;  // one entry for plain columns
    bool is_group = false;
};

// Unit catalog for a schema. With aggregation every one-hot group collapses
// into one unit; without it every column stands alone.
std::vector<PerturbUnit> perturb_units(const FeatureSchema& schema, bool aggregate_one_hot);

struct TopKMask {
    std::vector<PerturbUnit> selected;  // in descending |score| order
    int k = 0;
};

// Units ranked by |attribution| (groups by summed member |attribution|),
// ties broken by lower first-column index; k clamps to the unit count.
TopKMask top_k_mask(const Eigen::VectorXd& attribution_row, const FeatureSchema& schema,
                    int k, bool aggregate_categorical);

// Gaussian mode adds N(0, sigma^2) to selected numeric columns; marginal mode
// resamples them from the train-split empirical marginal. Selected
// categorical/one-hot units flip to a uniformly random different category
// with probability flip_prob. Unselected coordinates are untouched; one-hot
// row sums stay exactly 1.
Eigen::VectorXd perturb(const Eigen::VectorXd& x, const TopKMask& mask,
                        const PerturbSpec& spec, const Dataset& ds);

// m independent draws with child seeds derived from spec.seed; row j is run j.
Eigen::MatrixXd perturb_batch(const Eigen::VectorXd& x, const TopKMask& mask,
                              const PerturbSpec& spec, const Dataset& ds, int m);

}  // namespace faithbench
