#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "faithbench/data.hpp"
#include "faithbench/model.hpp"

namespace testutil {

// Self-deleting temp directory for file round-trip tests.
class TempDir {
  public:
    TempDir() {
        const auto base = std::filesystem::temp_directory_path();
        for (int attempt = 0;; ++attempt) {
            path_ = base / ("faithbench_test_" + std::to_string(std::random_device{}()) + "_" +
                            std::to_string(attempt));
            if (std::filesystem::create_directory(path_)) break;
        }
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

// All-numeric dataset straight from row data; split defaults to all-train.
inline faithbench::Dataset make_dataset(const std::vector<std::vector<double>>& rows,
                                        const std::vector<int>& labels,
                                        const std::vector<faithbench::SplitTag>& split = {}) {
    faithbench::Dataset ds;
    const size_t n = rows.size();
    const size_t d = rows.front().size();
    ds.schema = faithbench::FeatureSchema::all_numeric(static_cast<int>(d));
    ds.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < d; ++j)
            ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    ds.y = labels;
    ds.split = split.empty() ? std::vector<faithbench::SplitTag>(n, faithbench::SplitTag::train)
                             : split;
    ds.standardization.mean.assign(d, 0.0);
    ds.standardization.stddev.assign(d, 1.0);
    ds.validate();
    return ds;
}

// Single-layer model with fixed weights, bypassing training.
inline faithbench::DenseModel make_linear_model(const std::vector<double>& weights, double bias) {
    faithbench::DenseModel model;
    model.tag = faithbench::ArchTag::linear;
    model.input_dim = static_cast<int>(weights.size());
    faithbench::Layer layer;
    layer.W = Eigen::Map<const Eigen::RowVectorXd>(weights.data(),
                                                   static_cast<Eigen::Index>(weights.size()));
    layer.b = Eigen::VectorXd::Constant(1, bias);
    layer.act = faithbench::Activation::identity;
    model.layers.push_back(std::move(layer));
    model.validate();
    return model;
}

// Small dense3 model with deterministic pseudo-random weights.
inline faithbench::DenseModel make_dense3_model(int input_dim, int h1 = 8, int h2 = 6,
                                                uint64_t seed = 42) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> uni(-0.8, 0.8);
    auto fill = [&](Eigen::Index rows, Eigen::Index cols) {
        Eigen::MatrixXd w(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) w(i, j) = uni(gen);
        return w;
    };
    faithbench::DenseModel model;
    model.tag = faithbench::ArchTag::dense3;
    model.input_dim = input_dim;
    model.layers.push_back({fill(h1, input_dim), Eigen::VectorXd::Zero(h1), faithbench::Activation::relu});
    model.layers.push_back({fill(h2, h1), Eigen::VectorXd::Zero(h2), faithbench::Activation::relu});
    model.layers.push_back({fill(1, h2), Eigen::VectorXd::Zero(1), faithbench::Activation::identity});
    model.validate();
    return model;
}

}  // namespace testutil
