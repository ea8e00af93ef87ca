#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "faithbench/error.hpp"

namespace faithbench {

// Column names starting with this prefix are reserved for injected
// random-feature sanity checks.
inline constexpr const char* kRandomFeaturePrefix = "__rnd_";

enum class ColumnKind { numeric, categorical, one_hot_member };

std::string column_kind_name(ColumnKind kind);
ColumnKind column_kind_from_name(const std::string& name);

struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    std::string parent;   // non-empty for one_hot_member
    int cardinality = 0;  // number of categories for categorical kinds
};

struct FeatureSchema {
    std::vector<Column> columns;

    size_t size() const { return columns.size(); }
    // Column indices per one-hot group, keyed by first member index order.
    std::vector<std::vector<int>> one_hot_groups() const;
    std::optional<int> group_of(int column) const;  // group index or nullopt
    int column_index(const std::string& name) const;

    // Checks name uniqueness, parent/cardinality consistency and group
    // contiguity; throws ErrorCode::schema on violation.
    void validate() const;

    static FeatureSchema all_numeric(int d, const std::string& prefix = "f");

    nlohmann::json to_json() const;
    static FeatureSchema from_json(const nlohmann::json& j);
};

enum class SplitTag : uint8_t { train = 0, test = 1 };

struct Standardization {
    bool applied = false;
    std::vector<double> mean;  // per column; identity entries for non-numeric
    std::vector<double> stddev;
};

// Immutable after construction; safe to share across threads.
struct Dataset {
    FeatureSchema schema;
    Eigen::MatrixXd X;       // n x d
    std::vector<int> y;      // binary labels
    std::vector<SplitTag> split;
    Standardization standardization;
    std::string label_name = "label";
    uint64_t split_seed = 0;

    size_t rows() const { return static_cast<size_t>(X.rows()); }
    size_t cols() const { return static_cast<size_t>(X.cols()); }
    std::vector<size_t> train_indices() const;
    std::vector<size_t> test_indices() const;
    std::vector<int> random_feature_columns() const;

    // Content hash over schema, matrix, labels and split tags.
    std::string hash() const;

    void validate() const;
};

struct SyntheticSpec {
    int n_samples = 1000;
    int n_features = 24;
    // Empty: coefficients are drawn from the seed. Explicit all-zero is an error.
    std::vector<double> coefficients;
    double noise_std = 0.5;
    uint64_t seed = 0;

    nlohmann::json to_json() const;
    static SyntheticSpec from_json(const nlohmann::json& j);
};

Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema,
                 const std::string& label_column, uint64_t split_seed = 0);

Dataset generate_synthetic(const SyntheticSpec& spec);

// Train-split statistics only; numeric columns mapped to (x - mean)/std with
// population std. Zero-variance columns are centered and left unscaled.
Dataset standardize(const Dataset& ds);

// Appends `count` standard-normal columns named __rnd_<i>.
Dataset inject_random_features(const Dataset& ds, int count, uint64_t seed);

void save_dataset(const Dataset& ds, const std::filesystem::path& csv_path,
                  const std::filesystem::path& schema_path);
Dataset load_dataset(const std::filesystem::path& csv_path,
                     const std::filesystem::path& schema_path);

}  // namespace faithbench
