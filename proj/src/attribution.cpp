#include "faithbench/attribution.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "faithbench/io.hpp"
#include "faithbench/rng.hpp"

namespace faithbench {

namespace {

double evaluate(const DenseModel& model, const Eigen::VectorXd& x, GradientTarget target) {
    return target == GradientTarget::logit ? model.logit(x) : model.predict(x);
}

Eigen::VectorXd evaluate_batch(const DenseModel& model, const Eigen::MatrixXd& X,
                               GradientTarget target) {
    return target == GradientTarget::logit ? model.logit_batch(X) : model.predict_batch(X);
}

// Coalition masks are keyed by their byte pattern for deduplication.
std::string mask_key(const std::vector<char>& mask) {
    return std::string(mask.begin(), mask.end());
}

struct CoalitionBatch {
    std::vector<std::vector<char>> masks;  // 0/1 per feature
    std::vector<double> weights;
};

CoalitionBatch enumerate_coalitions(int d) {
    CoalitionBatch batch;
    const uint64_t total = uint64_t{1} << d;
    std::vector<double> log_fact(static_cast<size_t>(d) + 1, 0.0);
    for (int i = 2; i <= d; ++i)
        log_fact[static_cast<size_t>(i)] = log_fact[static_cast<size_t>(i - 1)] + std::log(i);
    for (uint64_t bits = 1; bits + 1 < total; ++bits) {
        std::vector<char> mask(static_cast<size_t>(d), 0);
        int size = 0;
        for (int j = 0; j < d; ++j) {
            if (bits & (uint64_t{1} << j)) {
                mask[static_cast<size_t>(j)] = 1;
                ++size;
            }
        }
        // Shapley kernel: (d-1) / (C(d,s) * s * (d-s)).
        const double log_comb = log_fact[static_cast<size_t>(d)] -
                                log_fact[static_cast<size_t>(size)] -
                                log_fact[static_cast<size_t>(d - size)];
        const double w = (d - 1) / (std::exp(log_comb) * size * (d - size));
        batch.masks.push_back(std::move(mask));
        batch.weights.push_back(w);
    }
    return batch;
}

CoalitionBatch sample_coalitions(int d, int budget, uint64_t seed) {
    // Coalition sizes drawn proportionally to the aggregate kernel weight per
    // size, 1/(s(d-s)); subsets uniform within a size; sampled in complement
    // pairs. Duplicates accumulate weight.
    std::vector<double> size_weight(static_cast<size_t>(d), 0.0);
    double total_weight = 0.0;
    for (int s = 1; s <= d - 1; ++s) {
        size_weight[static_cast<size_t>(s)] = 1.0 / (static_cast<double>(s) * (d - s));
        total_weight += size_weight[static_cast<size_t>(s)];
    }

    Rng rng(seed);
    std::map<std::string, std::pair<std::vector<char>, double>> seen;
    int produced = 0;
    while (produced < budget) {
        double u = rng.uniform() * total_weight;
        int size = 1;
        for (int s = 1; s <= d - 1; ++s) {
            u -= size_weight[static_cast<size_t>(s)];
            if (u <= 0.0) {
                size = s;
                break;
            }
            size = s;
        }
        const auto members = rng.sample_without_replacement(static_cast<size_t>(d),
                                                            static_cast<size_t>(size));
        std::vector<char> mask(static_cast<size_t>(d), 0);
        for (size_t m : members) mask[m] = 1;

        for (int half = 0; half < 2 && produced < budget; ++half) {
            if (half == 1)
                for (auto& v : mask) v = v ? 0 : 1;
            auto& slot = seen[mask_key(mask)];
            if (slot.first.empty()) slot.first = mask;
            slot.second += 1.0;
            ++produced;
        }
    }

    CoalitionBatch batch;
    for (auto& [key, entry] : seen) {
        batch.masks.push_back(std::move(entry.first));
        batch.weights.push_back(entry.second);
    }
    return batch;
}

// Mean model output over the reference rows with unmasked features taken
// from x: one row per (mask, reference) pair, evaluated in one batch.
std::vector<double> coalition_values(const DenseModel& model, const Eigen::VectorXd& x,
                                     const Eigen::MatrixXd& refs,
                                     const std::vector<std::vector<char>>& masks,
                                     GradientTarget target) {
    const Eigen::Index k = refs.rows();
    const Eigen::Index d = x.size();
    Eigen::MatrixXd composites(static_cast<Eigen::Index>(masks.size()) * k, d);
    for (size_t m = 0; m < masks.size(); ++m) {
        for (Eigen::Index r = 0; r < k; ++r) {
            Eigen::Index row = static_cast<Eigen::Index>(m) * k + r;
            for (Eigen::Index j = 0; j < d; ++j)
                composites(row, j) = masks[m][static_cast<size_t>(j)] ? x(j) : refs(r, j);
        }
    }
    const Eigen::VectorXd outputs = evaluate_batch(model, composites, target);
    std::vector<double> values(masks.size(), 0.0);
    for (size_t m = 0; m < masks.size(); ++m) {
        double sum = 0.0;
        for (Eigen::Index r = 0; r < k; ++r)
            sum += outputs(static_cast<Eigen::Index>(m) * k + r);
        values[m] = sum / static_cast<double>(k);
    }
    return values;
}

}  // namespace

std::string MethodId::name() const {
    switch (kind) {
        case Kind::integrated_gradients: return "integrated-gradients";
        case Kind::kernel_shap: return "kernel-shap";
        case Kind::random: return "random";
        case Kind::ground_truth: return "ground-truth";
        case Kind::imported: return label;
    }
    return label;
}

MethodId MethodId::parse(const std::string& name) {
    if (name == "integrated-gradients") return {Kind::integrated_gradients, ""};
    if (name == "kernel-shap") return {Kind::kernel_shap, ""};
    if (name == "random") return {Kind::random, ""};
    if (name == "ground-truth") return {Kind::ground_truth, ""};
    std::string label = name;
    // Accept both "imported:deep-shap" and a bare label.
    if (label.rfind("imported:", 0) == 0) label = label.substr(9);
    require(!label.empty(), ErrorCode::invalid_argument, "empty method name");
    return {Kind::imported, label};
}

std::string AttributionTable::baseline_name() const {
    return baseline ? baseline_kind_name(*baseline) : "none";
}

Eigen::VectorXd integrated_gradients(const DenseModel& model, const Eigen::VectorXd& x,
                                     const BaselineSet& baselines, const IGConfig& cfg,
                                     GradientTarget target) {
    require(cfg.steps >= 2, ErrorCode::invalid_argument, "integrated gradients needs steps >= 2");
    require(baselines.references.cols() == x.size(), ErrorCode::shape,
            "baseline width does not match the sample");

    const Eigen::Index k = baselines.references.rows();
    const Eigen::Index d = x.size();
    const int steps = cfg.steps;

    // Midpoint Riemann rule along each straight-line path, one gradient batch
    // for all (reference, step) pairs.
    Eigen::MatrixXd points(k * steps, d);
    for (Eigen::Index r = 0; r < k; ++r) {
        const Eigen::VectorXd b = baselines.references.row(r);
        const Eigen::VectorXd delta = x - b;
        for (int t = 0; t < steps; ++t) {
            const double alpha = (t + 0.5) / static_cast<double>(steps);
            points.row(r * steps + t) = (b + alpha * delta).transpose();
        }
    }
    const Eigen::MatrixXd grads = model.input_gradient_batch(points, target);

    Eigen::VectorXd result = Eigen::VectorXd::Zero(d);
    for (Eigen::Index r = 0; r < k; ++r) {
        Eigen::VectorXd avg_grad = Eigen::VectorXd::Zero(d);
        for (int t = 0; t < steps; ++t) avg_grad += grads.row(r * steps + t).transpose();
        avg_grad /= static_cast<double>(steps);
        const Eigen::VectorXd b = baselines.references.row(r);
        result += (x - b).cwiseProduct(avg_grad);
    }
    return result / static_cast<double>(k);
}

Eigen::VectorXd kernel_shap(const DenseModel& model, const Eigen::VectorXd& x,
                            const BaselineSet& baselines, const KernelShapConfig& cfg,
                            GradientTarget target) {
    const int d = static_cast<int>(x.size());
    require(d >= 1, ErrorCode::invalid_argument, "kernel_shap needs at least one feature");
    require(baselines.references.cols() == x.size(), ErrorCode::shape,
            "baseline width does not match the sample");

    const Eigen::Index k = baselines.references.rows();
    double v_empty = 0.0;
    for (Eigen::Index r = 0; r < k; ++r)
        v_empty += evaluate(model, baselines.references.row(r).transpose(), target);
    v_empty /= static_cast<double>(k);
    const double v_full = evaluate(model, x, target);
    const double delta = v_full - v_empty;

    if (d == 1) return Eigen::VectorXd::Constant(1, delta);

    const bool full_enum = d <= cfg.full_enumeration_max_dim;
    if (!full_enum)
        require(cfg.n_coalitions >= d + 2, ErrorCode::invalid_argument,
                "n_coalitions must be at least d + 2");

    const CoalitionBatch batch = full_enum
                                     ? enumerate_coalitions(d)
                                     : sample_coalitions(d, cfg.n_coalitions,
                                                         derive_seed(cfg.seed, "coalitions"));
    const std::vector<double> values =
        coalition_values(model, x, baselines.references, batch.masks, target);

    // Weighted least squares with the two endpoint constraints folded in:
    // phi_0 = v(empty) and sum(phi) = delta, eliminating the last feature.
    const int p = d - 1;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd row(p);
    for (size_t m = 0; m < batch.masks.size(); ++m) {
        const auto& mask = batch.masks[m];
        const double last = mask[static_cast<size_t>(d - 1)] ? 1.0 : 0.0;
        for (int j = 0; j < p; ++j) row(j) = (mask[static_cast<size_t>(j)] ? 1.0 : 0.0) - last;
        const double target_value = values[m] - v_empty - last * delta;
        const double w = batch.weights[m];
        gram.selfadjointView<Eigen::Lower>().rankUpdate(row, w);
        rhs += w * target_value * row;
    }
    gram = gram.selfadjointView<Eigen::Lower>();

    double ridge = cfg.ridge;
    for (;;) {
        Eigen::MatrixXd system = gram;
        if (ridge > 0.0) system.diagonal().array() += ridge;
        const Eigen::LDLT<Eigen::MatrixXd> solver(system);
        if (solver.info() == Eigen::Success) {
            const Eigen::VectorXd phi_head = solver.solve(rhs);
            if (phi_head.allFinite()) {
                Eigen::VectorXd phi(d);
                phi.head(p) = phi_head;
                phi(d - 1) = delta - phi_head.sum();
                return phi;
            }
        }
        // Singular system: escalate the ridge and retry.
        ridge = ridge == 0.0 ? 1e-10 : ridge * 100.0;
        require(ridge <= 1e-2, ErrorCode::numeric,
                "kernel_shap regression stayed singular despite ridge escalation");
    }
}

AttributionTable random_explanations(size_t n, size_t d, uint64_t seed) {
    AttributionTable table;
    table.method = {MethodId::Kind::random, ""};
    table.seed = seed;
    table.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    Rng rng(derive_seed(seed, "random-table"));
    for (Eigen::Index i = 0; i < table.values.rows(); ++i)
        for (Eigen::Index j = 0; j < table.values.cols(); ++j) table.values(i, j) = rng.uniform();
    return table;
}

AttributionTable ground_truth_linear(const DenseModel& model, const Dataset& ds) {
    require(model.tag == ArchTag::linear, ErrorCode::invalid_argument,
            "ground-truth explanations require a linear model");
    require(model.input_dim == static_cast<int>(ds.cols()), ErrorCode::shape,
            "model input width does not match the dataset");
    const Eigen::VectorXd coeffs = model.linear_coefficients();

    AttributionTable table;
    table.method = {MethodId::Kind::ground_truth, ""};
    table.dataset_hash = ds.hash();
    table.target = GradientTarget::logit;
    table.values = ds.X.array().rowwise() * coeffs.transpose().array();
    return table;
}

void save_table(const AttributionTable& table, const FeatureSchema& schema,
                const std::filesystem::path& csv_path,
                const std::filesystem::path& sidecar_path) {
    require(static_cast<size_t>(table.values.cols()) == schema.size(), ErrorCode::shape,
            "table width does not match schema");
    std::ostringstream csv;
    for (size_t j = 0; j < schema.size(); ++j) {
        if (j) csv << ',';
        csv << schema.columns[j].name;
    }
    csv << '\n';
    for (Eigen::Index i = 0; i < table.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < table.values.cols(); ++j) {
            if (j) csv << ',';
            csv << format_double(table.values(i, j));
        }
        csv << '\n';
    }
    write_text_file(csv_path, csv.str());

    nlohmann::json sidecar{{"method", table.method.name()},
                           {"baseline_kind", table.baseline_name()},
                           {"repeat", table.repeat},
                           {"seed", table.seed},
                           {"dataset_hash", table.dataset_hash},
                           {"target", table.target == GradientTarget::logit ? "logit" : "probability"}};
    write_json_file(sidecar_path, sidecar);
}

AttributionTable import_table(const std::filesystem::path& csv_path,
                              const std::filesystem::path& sidecar_path, const Dataset& ds) {
    const nlohmann::json sidecar = read_json_file(sidecar_path);
    for (const char* field : {"method", "baseline_kind", "repeat"})
        require(sidecar.contains(field), ErrorCode::parse,
                std::string("import sidecar missing '") + field + "': " + sidecar_path.string());

    const CsvTable csv = read_csv(csv_path);
    require(csv.header.size() == ds.cols(), ErrorCode::shape,
            "imported table has " + std::to_string(csv.header.size()) + " columns, dataset has " +
                std::to_string(ds.cols()));
    require(csv.rows.size() == ds.rows(), ErrorCode::shape,
            "imported table has " + std::to_string(csv.rows.size()) + " rows, dataset has " +
                std::to_string(ds.rows()));

    AttributionTable table;
    table.values.resize(static_cast<Eigen::Index>(ds.rows()), static_cast<Eigen::Index>(ds.cols()));
    for (size_t i = 0; i < csv.rows.size(); ++i) {
        require(csv.rows[i].size() == ds.cols(), ErrorCode::parse,
                "imported table row " + std::to_string(i) + " has the wrong field count");
        for (size_t j = 0; j < ds.cols(); ++j) {
            try {
                table.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    std::stod(csv.rows[i][j]);
            } catch (const std::exception&) {
                raise(ErrorCode::parse, "non-numeric value in imported table row " + std::to_string(i));
            }
        }
    }

    table.method = {MethodId::Kind::imported, sidecar["method"].get<std::string>()};
    const std::string baseline = sidecar["baseline_kind"].get<std::string>();
    if (baseline != "none") table.baseline = baseline_kind_from_name(baseline);
    table.repeat = sidecar["repeat"].get<int>();
    table.seed = sidecar.value("seed", uint64_t{0});
    table.dataset_hash = sidecar.value("dataset_hash", std::string());
    if (!table.dataset_hash.empty())
        require(table.dataset_hash == ds.hash(), ErrorCode::schema,
                "imported table was produced for a different dataset (hash mismatch)");
    table.target = sidecar.value("target", std::string("probability")) == "logit"
                       ? GradientTarget::logit
                       : GradientTarget::probability;
    return table;
}

AttributionTable generate_table(const Dataset& ds, const DenseModel& model, const GridSpec& spec,
                                const MethodId& method, std::optional<BaselineKind> baseline,
                                int repeat) {
    require(repeat >= 0, ErrorCode::invalid_argument, "repeat must be non-negative");
    const GradientTarget target =
        model.tag == ArchTag::linear ? GradientTarget::logit : GradientTarget::probability;

    if (method.kind == MethodId::Kind::random) {
        AttributionTable table = random_explanations(
            ds.rows(), ds.cols(),
            derive_seed(spec.master_seed, "table:random", static_cast<uint64_t>(repeat)));
        table.repeat = repeat;
        table.dataset_hash = ds.hash();
        table.target = target;
        return table;
    }
    if (method.kind == MethodId::Kind::ground_truth) {
        AttributionTable table = ground_truth_linear(model, ds);
        table.repeat = repeat;
        table.seed = derive_seed(spec.master_seed, "table:ground-truth", static_cast<uint64_t>(repeat));
        return table;
    }

    require(baseline.has_value(), ErrorCode::invalid_argument,
            "method '" + method.name() + "' needs a baseline kind");
    const std::string cell = "table:" + method.name() + ":" + baseline_kind_name(*baseline);
    const uint64_t seed = derive_seed(spec.master_seed, cell, static_cast<uint64_t>(repeat));

    if (method.kind == MethodId::Kind::imported) {
        // Externally produced tables are model-specific, so the layout keys
        // on the architecture as well.
        const std::string stem = method.label + "_" + arch_tag_name(model.tag) + "_" +
                                 baseline_kind_name(*baseline) + "_r" + std::to_string(repeat);
        AttributionTable table = import_table(spec.import_dir / (stem + ".csv"),
                                              spec.import_dir / (stem + ".json"), ds);
        table.baseline = *baseline;
        table.repeat = repeat;
        return table;
    }

    const auto n = static_cast<Eigen::Index>(ds.rows());
    AttributionTable table;
    table.method = method;
    table.baseline = *baseline;
    table.repeat = repeat;
    table.seed = seed;
    table.dataset_hash = ds.hash();
    table.target = target;
    table.values.resize(n, static_cast<Eigen::Index>(ds.cols()));

    // Predicted classes over the train split, shared by every opposite-class
    // baseline construction of this table.
    const auto train = ds.train_indices();
    std::vector<bool> train_class;
    Eigen::VectorXd all_probs;
    if (*baseline == BaselineKind::opposite_class) {
        Eigen::MatrixXd train_X(static_cast<Eigen::Index>(train.size()), ds.X.cols());
        for (size_t i = 0; i < train.size(); ++i)
            train_X.row(static_cast<Eigen::Index>(i)) = ds.X.row(static_cast<Eigen::Index>(train[i]));
        const Eigen::VectorXd train_probs = model.predict_batch(train_X);
        train_class.resize(train.size());
        for (size_t i = 0; i < train.size(); ++i)
            train_class[i] = train_probs(static_cast<Eigen::Index>(i)) >= 0.5;
        all_probs = model.predict_batch(ds.X);
    }

    BaselineSet shared;
    if (*baseline == BaselineKind::constant_median) shared = constant_median(ds);
    if (*baseline == BaselineKind::training)
        shared = training_sample(ds, spec.baseline_k, derive_seed(seed, "baseline"));

    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd x = ds.X.row(i);
        BaselineSet local;
        const BaselineSet* refs = &shared;
        if (*baseline == BaselineKind::opposite_class) {
            local = detail::opposite_class_prescored(
                ds, train_class, all_probs(i) >= 0.5, x, spec.baseline_k,
                derive_seed(seed, "baseline", static_cast<uint64_t>(i)));
            refs = &local;
        } else if (*baseline == BaselineKind::nearest_neighbors) {
            local = nearest_neighbors(ds, x, spec.baseline_k,
                                      derive_seed(seed, "baseline", static_cast<uint64_t>(i)));
            refs = &local;
        }

        if (method.kind == MethodId::Kind::integrated_gradients) {
            table.values.row(i) = integrated_gradients(model, x, *refs, spec.ig, target).transpose();
        } else {
            KernelShapConfig ks = spec.kernel_shap;
            ks.seed = derive_seed(seed, "shap", static_cast<uint64_t>(i));
            table.values.row(i) = kernel_shap(model, x, *refs, ks, target).transpose();
        }
    }
    return table;
}

std::vector<AttributionTable> generate_grid(const Dataset& ds, const DenseModel& model,
                                            const GridSpec& spec) {
    require(spec.repeats >= 1, ErrorCode::invalid_argument, "repeats must be positive");
    require(!spec.methods.empty(), ErrorCode::invalid_argument, "no attribution methods requested");
    for (const auto& method : spec.methods)
        require(method.kind != MethodId::Kind::random && method.kind != MethodId::Kind::ground_truth,
                ErrorCode::invalid_argument,
                "random and ground-truth tables are added automatically");

    std::vector<AttributionTable> tables;
    for (const auto& method : spec.methods)
        for (BaselineKind baseline : spec.baselines)
            for (int rep = 0; rep < spec.repeats; ++rep)
                tables.push_back(generate_table(ds, model, spec, method, baseline, rep));

    for (int rep = 0; rep < spec.repeats; ++rep)
        tables.push_back(generate_table(ds, model, spec, {MethodId::Kind::random, ""}, std::nullopt, rep));

    if (model.tag == ArchTag::linear)
        for (int rep = 0; rep < spec.repeats; ++rep)
            tables.push_back(
                generate_table(ds, model, spec, {MethodId::Kind::ground_truth, ""}, std::nullopt, rep));
    return tables;
}

}  // namespace faithbench
