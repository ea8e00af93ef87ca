#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "faithbench/data.hpp"

namespace faithbench {

enum class Activation { relu, identity };
enum class ArchTag { linear, dense3 };
enum class GradientTarget { probability, logit };

std::string arch_tag_name(ArchTag tag);
ArchTag arch_tag_from_name(const std::string& name);

struct Layer {
    Eigen::MatrixXd W;  // out x in
    Eigen::VectorXd b;
    Activation act = Activation::identity;
};

// Feed-forward binary classifier: hidden relu layers, identity output layer,
// sigmoid applied on top of the final pre-activation. Immutable once trained;
// predict/gradient are pure.
struct DenseModel {
    std::vector<Layer> layers;
    ArchTag tag = ArchTag::linear;
    int input_dim = 0;

    void validate() const;

    double logit(const Eigen::VectorXd& x) const;
    double predict(const Eigen::VectorXd& x) const;

    // Batched variants; rows are samples.
    Eigen::VectorXd logit_batch(const Eigen::MatrixXd& X) const;
    Eigen::VectorXd predict_batch(const Eigen::MatrixXd& X) const;

    // Exact reverse-mode gradient of the chosen target w.r.t. the input.
    // The relu subgradient at 0 is taken as 0.
    Eigen::VectorXd input_gradient(const Eigen::VectorXd& x, GradientTarget target) const;
    Eigen::MatrixXd input_gradient_batch(const Eigen::MatrixXd& X, GradientTarget target) const;

    // Coefficient vector of a linear model (single layer weights).
    Eigen::VectorXd linear_coefficients() const;
};

struct TrainConfig {
    int epochs = 150;
    int batch_size = 32;
    double learning_rate = 0.05;
    std::array<int, 2> hidden_widths = {64, 32};
    uint64_t seed = 0;

    void validate() const;
};

// Mini-batch gradient descent on log-loss; deterministic under seed.
DenseModel train(const Dataset& ds, const TrainConfig& cfg, ArchTag tag);

double sigmoid(double z);
double log_loss(const Eigen::VectorXd& probs, const std::vector<int>& y,
                const std::vector<size_t>& idx);

void save_model(const DenseModel& model, const std::filesystem::path& path);
DenseModel load_model(const std::filesystem::path& path);

}  // namespace faithbench
