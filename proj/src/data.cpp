#include "faithbench/data.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "faithbench/io.hpp"
#include "faithbench/rng.hpp"

namespace faithbench {

namespace {

constexpr double kTrainFraction = 0.8;

std::vector<SplitTag> make_split(size_t n, uint64_t seed) {
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    Rng rng(derive_seed(seed, "split"));
    rng.shuffle(order);
    const size_t n_train = std::max<size_t>(1, static_cast<size_t>(std::floor(kTrainFraction * static_cast<double>(n))));
    std::vector<SplitTag> split(n, SplitTag::test);
    for (size_t i = 0; i < std::min(n_train, n); ++i) split[order[i]] = SplitTag::train;
    return split;
}

double parse_number(const std::string& field, const std::string& context) {
    try {
        size_t pos = 0;
        const double v = std::stod(field, &pos);
        require(pos == field.size(), ErrorCode::parse, "trailing characters in numeric field '" + field + "' (" + context + ")");
        return v;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        raise(ErrorCode::parse, "cannot parse '" + field + "' as a number (" + context + ")");
    }
}

void check_one_hot_groups(const FeatureSchema& schema, const Eigen::MatrixXd& X) {
    for (const auto& group : schema.one_hot_groups()) {
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            double sum = 0.0;
            for (int c : group) sum += X(i, c);
            require(sum == 1.0, ErrorCode::schema,
                    "one-hot group '" + schema.columns[group[0]].parent + "' row " +
                        std::to_string(i) + " sums to " + format_double(sum) + ", expected 1");
        }
    }
}

}  // namespace

std::string column_kind_name(ColumnKind kind) {
    switch (kind) {
        case ColumnKind::numeric: return "numeric";
        case ColumnKind::categorical: return "categorical";
        case ColumnKind::one_hot_member: return "one_hot_member";
    }
    return "numeric";
}

ColumnKind column_kind_from_name(const std::string& name) {
    if (name == "numeric") return ColumnKind::numeric;
    if (name == "categorical") return ColumnKind::categorical;
    if (name == "one_hot_member") return ColumnKind::one_hot_member;
    raise(ErrorCode::parse, "unknown column kind: " + name);
}

std::vector<std::vector<int>> FeatureSchema::one_hot_groups() const {
    std::vector<std::vector<int>> groups;
    std::map<std::string, size_t> by_parent;
    for (size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].kind != ColumnKind::one_hot_member) continue;
        auto it = by_parent.find(columns[i].parent);
        if (it == by_parent.end()) {
            by_parent.emplace(columns[i].parent, groups.size());
            groups.push_back({static_cast<int>(i)});
        } else {
            groups[it->second].push_back(static_cast<int>(i));
        }
    }
    return groups;
}

std::optional<int> FeatureSchema::group_of(int column) const {
    const auto groups = one_hot_groups();
    for (size_t g = 0; g < groups.size(); ++g) {
        if (std::find(groups[g].begin(), groups[g].end(), column) != groups[g].end())
            return static_cast<int>(g);
    }
    return std::nullopt;
}

int FeatureSchema::column_index(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
        if (columns[i].name == name) return static_cast<int>(i);
    return -1;
}

void FeatureSchema::validate() const {
    require(!columns.empty(), ErrorCode::schema, "schema has no columns");
    std::set<std::string> names;
    for (const auto& col : columns) {
        require(!col.name.empty(), ErrorCode::schema, "empty column name");
        require(names.insert(col.name).second, ErrorCode::schema, "duplicate column name: " + col.name);
        require(col.name.find(',') == std::string::npos && col.name.find('\n') == std::string::npos,
                ErrorCode::schema, "column name contains a CSV delimiter: " + col.name);
        if (col.kind == ColumnKind::one_hot_member)
            require(!col.parent.empty(), ErrorCode::schema, "one_hot_member '" + col.name + "' has no parent");
        if (col.kind == ColumnKind::categorical)
            require(col.cardinality >= 2, ErrorCode::schema,
                    "categorical column '" + col.name + "' needs cardinality >= 2");
    }
    // Members sharing a parent must be contiguous and match the cardinality.
    std::map<std::string, std::pair<int, int>> span;  // parent -> (first, last)
    std::map<std::string, int> count;
    for (size_t i = 0; i < columns.size(); ++i) {
        if (columns[i].kind != ColumnKind::one_hot_member) continue;
        const auto& parent = columns[i].parent;
        if (!span.count(parent)) span[parent] = {static_cast<int>(i), static_cast<int>(i)};
        span[parent].second = static_cast<int>(i);
        ++count[parent];
    }
    for (const auto& [parent, range] : span) {
        const int width = range.second - range.first + 1;
        require(width == count[parent], ErrorCode::schema,
                "one-hot group '" + parent + "' members are not contiguous");
        require(count[parent] >= 2, ErrorCode::schema, "one-hot group '" + parent + "' has fewer than 2 members");
        for (int i = range.first; i <= range.second; ++i) {
            require(columns[i].cardinality == count[parent], ErrorCode::schema,
                    "one-hot member '" + columns[i].name + "' cardinality " +
                        std::to_string(columns[i].cardinality) + " != group size " +
                        std::to_string(count[parent]));
        }
    }
}

FeatureSchema FeatureSchema::all_numeric(int d, const std::string& prefix) {
    FeatureSchema schema;
    schema.columns.reserve(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i)
        schema.columns.push_back({prefix + std::to_string(i), ColumnKind::numeric, "", 0});
    return schema;
}

nlohmann::json FeatureSchema::to_json() const {
    nlohmann::json cols = nlohmann::json::array();
    for (const auto& col : columns) {
        nlohmann::json j{{"name", col.name}, {"kind", column_kind_name(col.kind)}};
        if (!col.parent.empty()) j["parent"] = col.parent;
        if (col.cardinality > 0) j["cardinality"] = col.cardinality;
        cols.push_back(std::move(j));
    }
    return nlohmann::json{{"columns", cols}};
}

FeatureSchema FeatureSchema::from_json(const nlohmann::json& j) {
    require(j.contains("columns") && j["columns"].is_array(), ErrorCode::parse,
            "schema JSON must contain a 'columns' array");
    FeatureSchema schema;
    for (const auto& c : j["columns"]) {
        Column col;
        col.name = c.at("name").get<std::string>();
        col.kind = column_kind_from_name(c.value("kind", std::string("numeric")));
        col.parent = c.value("parent", std::string());
        col.cardinality = c.value("cardinality", 0);
        schema.columns.push_back(std::move(col));
    }
    schema.validate();
    return schema;
}

std::vector<size_t> Dataset::train_indices() const {
    std::vector<size_t> out;
    for (size_t i = 0; i < split.size(); ++i)
        if (split[i] == SplitTag::train) out.push_back(i);
    return out;
}

std::vector<size_t> Dataset::test_indices() const {
    std::vector<size_t> out;
    for (size_t i = 0; i < split.size(); ++i)
        if (split[i] == SplitTag::test) out.push_back(i);
    return out;
}

std::vector<int> Dataset::random_feature_columns() const {
    std::vector<int> out;
    for (size_t i = 0; i < schema.columns.size(); ++i)
        if (schema.columns[i].name.rfind(kRandomFeaturePrefix, 0) == 0) out.push_back(static_cast<int>(i));
    return out;
}

std::string Dataset::hash() const {
    Fnv1a h;
    h.update(schema.to_json().dump());
    h.update(static_cast<uint64_t>(X.rows()));
    h.update(static_cast<uint64_t>(X.cols()));
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j) h.update(X(i, j));
    for (int label : y) h.update(static_cast<uint64_t>(label));
    for (SplitTag tag : split) h.update(static_cast<uint64_t>(tag));
    return h.hex();
}

void Dataset::validate() const {
    schema.validate();
    require(X.rows() > 0 && X.cols() > 0, ErrorCode::schema, "dataset is empty");
    require(static_cast<size_t>(X.cols()) == schema.size(), ErrorCode::shape,
            "matrix width does not match schema");
    require(y.size() == rows() && split.size() == rows(), ErrorCode::shape,
            "label/split length does not match row count");
    for (int label : y)
        require(label == 0 || label == 1, ErrorCode::schema, "labels must be binary");
    require(X.allFinite(), ErrorCode::schema, "dataset contains non-finite values");
    check_one_hot_groups(schema, X);
}

Dataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema,
                 const std::string& label_column, uint64_t split_seed) {
    schema.validate();
    const CsvTable csv = read_csv(path);

    std::map<std::string, int> header_index;
    for (size_t i = 0; i < csv.header.size(); ++i) header_index[csv.header[i]] = static_cast<int>(i);

    std::vector<int> col_map;
    col_map.reserve(schema.size());
    for (const auto& col : schema.columns) {
        auto it = header_index.find(col.name);
        require(it != header_index.end(), ErrorCode::schema,
                "schema column '" + col.name + "' missing from CSV header");
        col_map.push_back(it->second);
    }
    auto label_it = header_index.find(label_column);
    require(label_it != header_index.end(), ErrorCode::schema,
            "label column '" + label_column + "' missing from CSV header");

    const size_t n = csv.rows.size();
    require(n > 0, ErrorCode::schema, "CSV has no data rows");

    Dataset ds;
    ds.schema = schema;
    ds.label_name = label_column;
    ds.split_seed = split_seed;
    ds.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(schema.size()));
    ds.y.resize(n);
    for (size_t i = 0; i < n; ++i) {
        const auto& row = csv.rows[i];
        require(row.size() == csv.header.size(), ErrorCode::parse,
                "row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                    " fields, header has " + std::to_string(csv.header.size()));
        for (size_t j = 0; j < schema.size(); ++j)
            ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                parse_number(row[static_cast<size_t>(col_map[j])], "row " + std::to_string(i));
        const double label = parse_number(row[static_cast<size_t>(label_it->second)], "label row " + std::to_string(i));
        require(label == 0.0 || label == 1.0, ErrorCode::schema,
                "label must be 0 or 1, got " + format_double(label) + " at row " + std::to_string(i));
        ds.y[i] = static_cast<int>(label);
    }
    ds.split = make_split(n, split_seed);
    ds.standardization.mean.assign(schema.size(), 0.0);
    ds.standardization.stddev.assign(schema.size(), 1.0);
    ds.validate();
    return ds;
}

nlohmann::json SyntheticSpec::to_json() const {
    nlohmann::json j{{"n_samples", n_samples},
                     {"n_features", n_features},
                     {"noise_std", noise_std},
                     {"seed", seed}};
    if (!coefficients.empty()) j["coefficients"] = coefficients;
    return j;
}

SyntheticSpec SyntheticSpec::from_json(const nlohmann::json& j) {
    SyntheticSpec spec;
    spec.n_samples = j.value("n_samples", spec.n_samples);
    spec.n_features = j.value("n_features", spec.n_features);
    spec.noise_std = j.value("noise_std", spec.noise_std);
    spec.seed = j.value("seed", spec.seed);
    if (j.contains("coefficients")) spec.coefficients = j["coefficients"].get<std::vector<double>>();
    return spec;
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
    require(spec.n_samples > 0, ErrorCode::invalid_argument, "n_samples must be positive");
    require(spec.n_features > 0, ErrorCode::invalid_argument, "n_features must be positive");
    require(spec.noise_std >= 0.0, ErrorCode::invalid_argument, "noise_std must be non-negative");

    const int n = spec.n_samples;
    const int d = spec.n_features;

    std::vector<double> coeffs = spec.coefficients;
    if (coeffs.empty()) {
        Rng rng(derive_seed(spec.seed, "coefficients"));
        coeffs.resize(static_cast<size_t>(d));
        for (auto& c : coeffs) c = rng.normal();
    }
    require(static_cast<int>(coeffs.size()) == d, ErrorCode::invalid_argument,
            "coefficient vector length does not match n_features");
    const bool all_zero = std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; });
    require(!all_zero, ErrorCode::invalid_argument, "coefficient vector is all zeros");

    Dataset ds;
    ds.schema = FeatureSchema::all_numeric(d);
    ds.label_name = "label";
    ds.split_seed = derive_seed(spec.seed, "synthetic-split");
    ds.X.resize(n, d);
    ds.y.resize(static_cast<size_t>(n));

    Rng features(derive_seed(spec.seed, "features"));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) ds.X(i, j) = features.normal();

    Rng noise(derive_seed(spec.seed, "noise"));
    int positives = 0;
    for (int i = 0; i < n; ++i) {
        double logit = 0.0;
        for (int j = 0; j < d; ++j) logit += coeffs[static_cast<size_t>(j)] * ds.X(i, j);
        if (spec.noise_std > 0.0) logit += spec.noise_std * noise.normal();
        ds.y[static_cast<size_t>(i)] = logit > 0.0 ? 1 : 0;
        positives += ds.y[static_cast<size_t>(i)];
    }
    // Binomial noise makes the balance band meaningless for tiny n; the
    // guarantee is stated at benchmark scale.
    if (n >= 500) {
        const double balance = static_cast<double>(positives) / static_cast<double>(n);
        require(balance >= 0.4 && balance <= 0.6, ErrorCode::numeric,
                "synthetic class balance " + format_double(balance) + " outside [0.4, 0.6]");
    }

    ds.split = make_split(static_cast<size_t>(n), ds.split_seed);
    ds.standardization.mean.assign(static_cast<size_t>(d), 0.0);
    ds.standardization.stddev.assign(static_cast<size_t>(d), 1.0);
    ds.validate();
    return ds;
}

Dataset standardize(const Dataset& ds) {
    Dataset out = ds;
    const auto train = ds.train_indices();
    require(!train.empty(), ErrorCode::schema, "standardize needs a non-empty train split");

    out.standardization.applied = true;
    out.standardization.mean.assign(ds.cols(), 0.0);
    out.standardization.stddev.assign(ds.cols(), 1.0);

    for (size_t j = 0; j < ds.cols(); ++j) {
        if (ds.schema.columns[j].kind != ColumnKind::numeric) continue;
        double mean = 0.0;
        for (size_t i : train) mean += ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        mean /= static_cast<double>(train.size());
        double var = 0.0;
        for (size_t i : train) {
            const double delta = ds.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - mean;
            var += delta * delta;
        }
        var /= static_cast<double>(train.size());
        const double sd = std::sqrt(var);
        const double divisor = sd == 0.0 ? 1.0 : sd;
        out.standardization.mean[j] = mean;
        out.standardization.stddev[j] = divisor;
        for (Eigen::Index i = 0; i < out.X.rows(); ++i)
            out.X(i, static_cast<Eigen::Index>(j)) =
                (ds.X(i, static_cast<Eigen::Index>(j)) - mean) / divisor;
    }
    return out;
}

Dataset inject_random_features(const Dataset& ds, int count, uint64_t seed) {
    require(count >= 1, ErrorCode::invalid_argument, "inject_random_features needs count >= 1");
    require(ds.random_feature_columns().empty(), ErrorCode::schema,
            "dataset already contains reserved __rnd_ columns");

    Dataset out = ds;
    const auto n = ds.X.rows();
    const auto d = ds.X.cols();
    out.X.conservativeResize(n, d + count);

    Rng rng(derive_seed(seed, "inject"));
    for (int c = 0; c < count; ++c) {
        out.schema.columns.push_back(
            {std::string(kRandomFeaturePrefix) + std::to_string(c), ColumnKind::numeric, "", 0});
        for (Eigen::Index i = 0; i < n; ++i) out.X(i, d + c) = rng.normal();
        out.standardization.mean.push_back(0.0);
        out.standardization.stddev.push_back(1.0);
    }
    out.validate();
    return out;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& csv_path,
                  const std::filesystem::path& schema_path) {
    std::ostringstream csv;
    for (const auto& col : ds.schema.columns) csv << col.name << ',';
    csv << ds.label_name << '\n';
    for (Eigen::Index i = 0; i < ds.X.rows(); ++i) {
        for (Eigen::Index j = 0; j < ds.X.cols(); ++j) csv << format_double(ds.X(i, j)) << ',';
        csv << ds.y[static_cast<size_t>(i)] << '\n';
    }
    write_text_file(csv_path, csv.str());

    nlohmann::json sidecar = ds.schema.to_json();
    sidecar["label"] = ds.label_name;
    sidecar["split_seed"] = ds.split_seed;
    if (ds.standardization.applied) {
        sidecar["standardization"] = {{"mean", ds.standardization.mean},
                                      {"stddev", ds.standardization.stddev}};
    }
    write_json_file(schema_path, sidecar);
}

Dataset load_dataset(const std::filesystem::path& csv_path,
                     const std::filesystem::path& schema_path) {
    const nlohmann::json sidecar = read_json_file(schema_path);
    const FeatureSchema schema = FeatureSchema::from_json(sidecar);
    const std::string label = sidecar.value("label", std::string("label"));
    const uint64_t split_seed = sidecar.value("split_seed", uint64_t{0});
    Dataset ds = load_csv(csv_path, schema, label, split_seed);
    if (sidecar.contains("standardization")) {
        ds.standardization.applied = true;
        ds.standardization.mean = sidecar["standardization"]["mean"].get<std::vector<double>>();
        ds.standardization.stddev = sidecar["standardization"]["stddev"].get<std::vector<double>>();
        require(ds.standardization.mean.size() == ds.cols() &&
                    ds.standardization.stddev.size() == ds.cols(),
                ErrorCode::parse, "standardization arrays do not match column count");
    }
    return ds;
}

}  // namespace faithbench
