#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "faithbench/data.hpp"
#include "faithbench/model.hpp"

namespace faithbench {

enum class BaselineKind { constant_median, training, opposite_class, nearest_neighbors };

std::string baseline_kind_name(BaselineKind kind);
BaselineKind baseline_kind_from_name(const std::string& name);

struct BaselineSet {
    BaselineKind kind = BaselineKind::constant_median;
    Eigen::MatrixXd references;  // k x d; k == 1 for constant_median
    std::optional<Eigen::VectorXd> anchor;
    uint64_t seed = 0;
    // Set when fewer than k opposite-class rows exist and all were returned.
    bool short_set = false;
};

// Column-wise train-split median; one-hot groups contribute their modal
// indicator vector, categorical columns their modal code.
BaselineSet constant_median(const Dataset& ds);

// k train rows uniformly without replacement.
BaselineSet training_sample(const Dataset& ds, int k, uint64_t seed);

// k nearest train rows whose predicted class (threshold 0.5) differs from the
// anchor's. Fewer than k available: all of them, short_set = true. None:
// ErrorCode::unavailable.
BaselineSet opposite_class(const Dataset& ds, const DenseModel& model,
                           const Eigen::VectorXd& anchor, int k, uint64_t seed);

// k nearest train rows by Euclidean distance, rows exactly equal to the
// anchor excluded. Distance ties break on the lower row index.
BaselineSet nearest_neighbors(const Dataset& ds, const Eigen::VectorXd& anchor,
                              int k, uint64_t seed);

namespace detail {

// opposite_class with the per-train-row predicted classes precomputed, so
// grid generation can score the train split once per model.
BaselineSet opposite_class_prescored(const Dataset& ds, const std::vector<bool>& train_row_class,
                                     bool anchor_class, const Eigen::VectorXd& anchor, int k,
                                     uint64_t seed);

}  // namespace detail

}  // namespace faithbench
