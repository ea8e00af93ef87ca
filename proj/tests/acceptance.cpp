// Acceptance suite: end-to-end checks of the benchmark engine against its
// contracts. Each criterion prints exactly one PASS/FAIL line; the binary
// exits nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "faithbench/harness.hpp"
#include "faithbench/io.hpp"
#include "faithbench/rng.hpp"
#include "oracles.hpp"

using namespace faithbench;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool condition, const std::string& message) {
        if (!condition && ok) {
            ok = false;
            detail = message;
        }
    }
    void note(const std::string& message) {
        if (detail.empty()) detail = message;
    }
};

fs::path workspace() {
    static fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / "faithbench_acceptance";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

// The synthetic benchmark task shared by the pipeline criteria: a linear
// logit with geometrically decaying coefficients, so the ground-truth
// explanations carry a clear importance hierarchy.
std::vector<double> benchmark_coefficients() {
    std::vector<double> coeffs(24);
    for (int j = 0; j < 24; ++j) coeffs[j] = 3.0 * std::pow(0.75, j) * (j % 2 ? -1.0 : 1.0);
    return coeffs;
}

constexpr uint64_t kMasterSeed = 11;

nlohmann::json base_config_json(const fs::path& out_dir) {
    return nlohmann::json{
        {"dataset", {{"synthetic", {{"n_samples", 1000},
                                    {"n_features", 24},
                                    {"seed", 1},
                                    {"coefficients", benchmark_coefficients()}}},
                     {"name", "synthetic"}}},
        {"architectures", {"linear", "dense3"}},
        {"methods", {"integrated-gradients", "kernel-shap", "imported:deep-shap"}},
        {"baselines",
         {"constant-median", "training", "opposite-class", "nearest-neighbors"}},
        {"repeats", 3},
        {"baseline_k", 5},
        {"perturb", {{"numeric_mode", "marginal"}}},
        {"pgi", {{"m", 10}}},
        {"tda", {{"bootstraps", 30}}},
        {"seed", kMasterSeed},
        {"import_dir", (out_dir.parent_path() / "imports").string()},
        {"out_dir", out_dir.string()},
    };
}

// Externally produced attribution tables, stood in for Deep SHAP: a
// DeepLIFT-style rescale linearization of the probability output against each
// reference — input-delta times the midpoint gradient of the logit, scaled by
// the secant slope of the sigmoid between the reference and the sample —
// written through the standard import format.
void write_deep_shap_standins(const ExperimentConfig& cfg, const fs::path& import_dir) {
    fs::create_directories(import_dir);

    SyntheticSpec spec = *cfg.dataset.synthetic;
    const Dataset ds = standardize(generate_synthetic(spec));
    const std::string ds_hash = ds.hash();

    const auto train_rows = ds.train_indices();

    for (ArchTag arch : cfg.architectures) {
        TrainConfig train_cfg = cfg.train;
        train_cfg.seed = derive_seed(cfg.master_seed, "train:" + arch_tag_name(arch));
        const DenseModel model = train(ds, train_cfg, arch);

        Eigen::MatrixXd train_X(static_cast<Eigen::Index>(train_rows.size()), ds.X.cols());
        for (size_t i = 0; i < train_rows.size(); ++i)
            train_X.row(static_cast<Eigen::Index>(i)) =
                ds.X.row(static_cast<Eigen::Index>(train_rows[i]));
        const Eigen::VectorXd train_probs = model.predict_batch(train_X);
        std::vector<bool> train_class(train_rows.size());
        for (size_t i = 0; i < train_rows.size(); ++i)
            train_class[i] = train_probs(static_cast<Eigen::Index>(i)) >= 0.5;
        const Eigen::VectorXd all_probs = model.predict_batch(ds.X);

        for (BaselineKind baseline : cfg.baselines) {
            for (int rep = 0; rep < cfg.repeats; ++rep) {
                const uint64_t seed =
                    derive_seed(cfg.master_seed,
                                "import:deep-shap:" + baseline_kind_name(baseline) +
                                    ":" + arch_tag_name(arch),
                                static_cast<uint64_t>(rep));

                BaselineSet shared;
                if (baseline == BaselineKind::constant_median) shared = constant_median(ds);
                if (baseline == BaselineKind::training)
                    shared = training_sample(ds, cfg.baseline_k, derive_seed(seed, "refs"));

                AttributionTable table;
                table.method = {MethodId::Kind::imported, "deep-shap"};
                table.baseline = baseline;
                table.repeat = rep;
                table.seed = seed;
                table.dataset_hash = ds_hash;
                table.target = GradientTarget::probability;
                table.values.resize(ds.X.rows(), ds.X.cols());

                for (Eigen::Index i = 0; i < ds.X.rows(); ++i) {
                    const Eigen::VectorXd x = ds.X.row(i);
                    Eigen::MatrixXd refs;
                    if (baseline == BaselineKind::opposite_class) {
                        refs = detail::opposite_class_prescored(
                                   ds, train_class, all_probs(i) >= 0.5, x, cfg.baseline_k,
                                   derive_seed(seed, "refs", static_cast<uint64_t>(i)))
                                   .references;
                    } else if (baseline == BaselineKind::nearest_neighbors) {
                        refs = nearest_neighbors(ds, x, cfg.baseline_k,
                                                 derive_seed(seed, "refs", static_cast<uint64_t>(i)))
                                   .references;
                    } else {
                        refs = shared.references;
                    }

                    Eigen::VectorXd attribution = Eigen::VectorXd::Zero(ds.X.cols());
                    const double zx = model.logit(x);
                    for (Eigen::Index r = 0; r < refs.rows(); ++r) {
                        const Eigen::VectorXd b = refs.row(r);
                        const Eigen::VectorXd midpoint = 0.5 * (x + b);
                        const Eigen::VectorXd grad =
                            model.input_gradient(midpoint, GradientTarget::logit);
                        const double zb = model.logit(b);
                        // Secant slope of the sigmoid between reference and
                        // sample; the derivative at the sample when they meet.
                        const double dz = zx - zb;
                        const double px = sigmoid(zx);
                        const double slope =
                            std::abs(dz) > 1e-12 ? (px - sigmoid(zb)) / dz : px * (1.0 - px);
                        attribution += slope * (x - b).cwiseProduct(grad);
                    }
                    table.values.row(i) =
                        attribution.transpose() / static_cast<double>(refs.rows());
                }

                const std::string stem = "deep-shap_" + arch_tag_name(arch) + "_" +
                                         baseline_kind_name(baseline) + "_r" + std::to_string(rep);
                save_table(table, ds.schema, import_dir / (stem + ".csv"),
                           import_dir / (stem + ".json"));
            }
        }
    }
}

size_t count_files(const fs::path& dir, const std::string& needle, const std::string& suffix) {
    size_t n = 0;
    if (!fs::exists(dir)) return 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.find(needle) != std::string::npos && name.size() > suffix.size() &&
            name.substr(name.size() - suffix.size()) == suffix)
            ++n;
    }
    return n;
}

std::map<std::string, std::vector<std::pair<std::string, std::string>>> read_rankings(
    const fs::path& path) {
    // metric -> ordered list of (method, baseline)
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> out;
    const CsvTable csv = read_csv(path);
    for (const auto& row : csv.rows) out[row[1]].push_back({row[3], row[4]});
    return out;
}

// Shared pipeline state across criteria.
struct PipelineRun {
    bool attempted = false;
    bool ok = false;
    double elapsed_seconds = 0.0;
    std::string error;
    fs::path out_dir;
    ExperimentConfig cfg;
};

PipelineRun g_grid;

void run_full_grid() {
    g_grid.attempted = true;
    g_grid.out_dir = workspace() / "grid";
    try {
        const nlohmann::json config = base_config_json(g_grid.out_dir);
        g_grid.cfg = ExperimentConfig::from_json(config);
        write_deep_shap_standins(g_grid.cfg, workspace() / "imports");

        const auto start = std::chrono::steady_clock::now();
        const GridResult result = run_grid(g_grid.cfg);
        g_grid.elapsed_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        for (const auto& cell : result.cells) {
            if (cell.status == CellStatus::failed)
                throw Error(ErrorCode::internal, "cell " + cell.id + " failed: " + cell.message);
        }
        g_grid.ok = true;
    } catch (const std::exception& ex) {
        g_grid.error = ex.what();
    }
}

struct PermutationRun {
    bool attempted = false;
    bool ok = false;
    std::string error;
    std::vector<PermutationResultRow> rows;
};

PermutationRun g_perm;

void run_permutation() {
    g_perm.attempted = true;
    try {
        nlohmann::json config = base_config_json(workspace() / "perm");
        config["architectures"] = {"linear"};
        config["tda"] = {{"resolution", 24}};
        const ExperimentConfig cfg = ExperimentConfig::from_json(config);
        PermutationExperiment exp;
        exp.fractions = {0.0, 0.25, 0.5, 0.75, 1.0};
        exp.repeats = 3;
        exp.seed = derive_seed(cfg.master_seed, "permutation");
        g_perm.rows = run_permutation_experiment(cfg, exp);
        g_perm.ok = true;
    } catch (const std::exception& ex) {
        g_perm.error = ex.what();
    }
}

std::map<int, std::map<double, double>> metric_by_repeat(const std::string& metric) {
    std::map<int, std::map<double, double>> out;
    for (const auto& row : g_perm.rows)
        if (row.metric == metric) out[row.repeat][row.fraction] = row.value;
    return out;
}

std::map<double, double> metric_mean(const std::string& metric) {
    std::map<double, double> sums;
    std::map<double, int> counts;
    for (const auto& row : g_perm.rows) {
        if (row.metric != metric) continue;
        sums[row.fraction] += row.value;
        counts[row.fraction] += 1;
    }
    for (auto& [f, v] : sums) v /= counts[f];
    return sums;
}

// ---- criteria ------------------------------------------------------------

Check criterion_grid_cardinality() {
    Check check;
    if (!g_grid.attempted) run_full_grid();
    check.require(g_grid.ok, "pipeline failed: " + g_grid.error);
    if (!check.ok) return check;

    const size_t dense_tables = count_files(g_grid.out_dir / "attributions", "_dense3_", ".csv");
    const size_t linear_tables = count_files(g_grid.out_dir / "attributions", "_linear_", ".csv");
    check.require(dense_tables == 39,
                  "expected 39 dense3 tables, found " + std::to_string(dense_tables));
    check.require(linear_tables == 42,
                  "expected 42 linear tables, found " + std::to_string(linear_tables));
    check.require(g_grid.elapsed_seconds <= 600.0,
                  "runtime " + std::to_string(g_grid.elapsed_seconds) + "s exceeds 600s");
    check.note("39 dense3 + 42 linear tables in " +
               std::to_string(static_cast<int>(g_grid.elapsed_seconds)) + "s");
    return check;
}

Check criterion_abc_monotonic() {
    Check check;
    if (!g_perm.attempted) run_permutation();
    check.require(g_perm.ok, "permutation experiment failed: " + g_perm.error);
    if (!check.ok) return check;

    const auto by_repeat = metric_by_repeat("ABC");
    int strict_repeats = 0;
    for (const auto& [rep, values] : by_repeat) {
        double lo = 1e300, hi = -1e300;
        for (const auto& [f, v] : values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        const double tolerance = 1e-4 * (hi - lo);
        bool strict = true;
        double prev = -1e300;
        for (const auto& [f, v] : values) {
            if (v - prev <= tolerance) strict = false;
            prev = v;
        }
        strict_repeats += strict;
    }
    check.require(strict_repeats >= 2,
                  "ABC strictly increasing in only " + std::to_string(strict_repeats) +
                      " of 3 repeats");

    const auto mean = metric_mean("ABC");
    double prev = -1e300;
    bool increasing = true;
    for (const auto& [f, v] : mean) {
        if (v <= prev) increasing = false;
        prev = v;
    }
    check.require(increasing, "aggregate mean ABC is not increasing");
    check.note(std::to_string(strict_repeats) + "/3 repeats strictly increasing");
    return check;
}

Check criterion_bnd_plateau() {
    Check check;
    if (!g_perm.attempted) run_permutation();
    check.require(g_perm.ok, "permutation experiment failed: " + g_perm.error);
    if (!check.ok) return check;

    const auto mean = metric_mean("BND");
    const double bnd_full = mean.at(1.0);
    for (double f : {0.0, 0.25, 0.5})
        for (double g : {0.0, 0.25, 0.5})
            check.require(std::abs(mean.at(f) - mean.at(g)) <= 0.1 * bnd_full,
                          "plateau spread exceeds 10% of BND(1.0)");
    check.require(bnd_full > mean.at(0.5), "BND(1.0) does not exceed BND(0.5)");
    std::ostringstream detail;
    detail << "mean BND per fraction:";
    for (const auto& [f, v] : mean) detail << " " << format_double(v);
    check.note(detail.str());
    return check;
}

Check criterion_ranking_sanity() {
    Check check;
    if (!g_grid.attempted) run_full_grid();
    check.require(g_grid.ok, "pipeline failed: " + g_grid.error);
    if (!check.ok) return check;

    const auto rankings = read_rankings(g_grid.out_dir / "rank" / "synthetic_linear_rankings.csv");
    std::string detail;
    for (const std::string metric : {"ABC", "PGI"}) {
        const auto it = rankings.find(metric);
        check.require(it != rankings.end(), metric + " ranking missing");
        if (it == rankings.end()) continue;
        int gt_rank = -1, random_rank = -1;
        for (size_t i = 0; i < it->second.size(); ++i) {
            if (it->second[i].first == "ground-truth") gt_rank = static_cast<int>(i);
            if (it->second[i].first == "random") random_rank = static_cast<int>(i);
        }
        if (!detail.empty()) detail += "; ";
        detail += metric + ": ground-truth@" + std::to_string(gt_rank) + " (top " +
                  it->second.front().first + "|" + it->second.front().second + "), random@" +
                  std::to_string(random_rank) + "/" + std::to_string(it->second.size() - 1);
        if (gt_rank != 0) check.ok = false;
        if (random_rank != static_cast<int>(it->second.size()) - 1) check.ok = false;
    }
    check.detail = detail;
    return check;
}

Check criterion_metric_disagreement() {
    Check check;
    if (!g_grid.attempted) run_full_grid();
    check.require(g_grid.ok, "pipeline failed: " + g_grid.error);
    if (!check.ok) return check;

    const nlohmann::json manifest = read_json_file(g_grid.out_dir / "manifest.json");
    const auto anomalies = manifest.value("anomalies", std::vector<std::string>());

    for (const char* kind : {"spearman", "kendall", "weighted-kendall"}) {
        const fs::path path = g_grid.out_dir / "rank" /
                              ("synthetic_dense3_agreement_" + std::string(kind) + ".csv");
        const CsvTable csv = read_csv(path);
        bool found_low = false;
        for (size_t i = 0; i < csv.rows.size(); ++i)
            for (size_t j = 1; j < csv.rows[i].size(); ++j)
                if (j - 1 != i && std::stod(csv.rows[i][j]) < 0.9) found_low = true;
        if (!found_low) {
            // The pipeline check still passes when the anomaly is flagged.
            bool flagged = false;
            for (const auto& a : anomalies)
                if (a.find(kind) != std::string::npos && a.find("dense3") != std::string::npos)
                    flagged = true;
            check.require(flagged, std::string(kind) +
                                       ": no off-diagonal entry below 0.9 and no anomaly flag");
        }
    }
    return check;
}

Check criterion_ig_correctness() {
    Check check;
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> uni(-1.5, 1.5);

    // Linear models: IG equals (x - mean_b) .* c to 1e-10 per coordinate.
    for (int trial = 0; trial < 10; ++trial) {
        const int d = 3 + trial % 5;
        DenseModel model;
        model.tag = ArchTag::linear;
        model.input_dim = d;
        Layer layer;
        layer.W.resize(1, d);
        for (int j = 0; j < d; ++j) layer.W(0, j) = uni(gen);
        layer.b = Eigen::VectorXd::Constant(1, uni(gen));
        layer.act = Activation::identity;
        model.layers.push_back(layer);

        BaselineSet baselines;
        baselines.references.resize(3, d);
        for (int r = 0; r < 3; ++r)
            for (int j = 0; j < d; ++j) baselines.references(r, j) = uni(gen);

        Eigen::VectorXd x(d);
        for (int j = 0; j < d; ++j) x(j) = uni(gen);

        const Eigen::VectorXd ig =
            integrated_gradients(model, x, baselines, {50}, GradientTarget::logit);
        const Eigen::VectorXd mean_ref = baselines.references.colwise().mean();
        const Eigen::VectorXd expected =
            (x - mean_ref).cwiseProduct(model.layers[0].W.row(0).transpose());
        check.require((ig - expected).cwiseAbs().maxCoeff() <= 1e-10,
                      "linear IG deviates from (x-b) .* c beyond 1e-10");
    }

    // dense3: completeness gap <= 1e-2 at 300 steps over 100 random samples.
    SyntheticSpec spec;
    spec.n_samples = 300;
    spec.n_features = 8;
    spec.seed = 3;
    const Dataset ds = standardize(generate_synthetic(spec));
    TrainConfig tc;
    tc.epochs = 60;
    tc.hidden_widths = {16, 8};
    tc.seed = 5;
    const DenseModel dense = train(ds, tc, ArchTag::dense3);

    BaselineSet baselines;
    baselines.references.resize(2, 8);
    for (int r = 0; r < 2; ++r)
        for (int j = 0; j < 8; ++j) baselines.references(r, j) = uni(gen);
    double mean_ref_output = 0.0;
    for (int r = 0; r < 2; ++r)
        mean_ref_output += dense.predict(baselines.references.row(r).transpose()) / 2.0;

    double worst = 0.0;
    for (int probe = 0; probe < 100; ++probe) {
        Eigen::VectorXd x(8);
        for (int j = 0; j < 8; ++j) x(j) = uni(gen);
        const double gap =
            std::abs(integrated_gradients(dense, x, baselines, {300}, GradientTarget::probability)
                         .sum() -
                     (dense.predict(x) - mean_ref_output));
        worst = std::max(worst, gap);
    }
    check.require(worst <= 1e-2, "dense3 completeness gap " + format_double(worst) + " > 1e-2");
    check.note("max completeness gap " + format_double(worst));
    return check;
}

Check criterion_kernel_shap_oracle() {
    Check check;
    SyntheticSpec spec;
    spec.n_samples = 200;
    spec.n_features = 8;
    spec.seed = 12;
    const Dataset ds = standardize(generate_synthetic(spec));
    TrainConfig tc;
    tc.epochs = 40;
    tc.hidden_widths = {12, 6};
    tc.seed = 9;
    const DenseModel model = train(ds, tc, ArchTag::dense3);

    BaselineSet baselines;
    baselines.references.resize(2, 8);
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int r = 0; r < 2; ++r)
        for (int j = 0; j < 8; ++j) baselines.references(r, j) = uni(gen);

    KernelShapConfig cfg;  // d=8 -> exact enumeration
    double worst = 0.0;
    for (int probe = 0; probe < 20; ++probe) {
        Eigen::VectorXd x(8);
        for (int j = 0; j < 8; ++j) x(j) = uni(gen);
        const Eigen::VectorXd phi = kernel_shap(model, x, baselines, cfg, GradientTarget::probability);
        const Eigen::VectorXd exact =
            oracle::shapley_bruteforce(model, x, baselines.references, GradientTarget::probability);
        worst = std::max(worst, (phi - exact).cwiseAbs().maxCoeff());
    }
    check.require(worst <= 1e-6, "kernel SHAP deviates from brute-force Shapley by " +
                                     format_double(worst));
    check.note("max |phi - exact| = " + format_double(worst));
    return check;
}

Check criterion_bottleneck_oracle() {
    Check check;
    std::mt19937_64 gen(41);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::uniform_int_distribution<int> size_dist(0, 6);
    auto random_diagram = [&]() {
        PersistenceDiagram diagram;
        const int n = size_dist(gen);
        for (int i = 0; i < n; ++i) {
            const double birth = uni(gen);
            diagram.push_back({birth, birth + uni(gen), PersistenceClass::component});
        }
        return diagram;
    };

    for (int trial = 0; trial < 200; ++trial) {
        const PersistenceDiagram a = random_diagram();
        const PersistenceDiagram b = random_diagram();
        const PersistenceDiagram c = random_diagram();
        const double ab = bottleneck(a, b);
        check.require(std::abs(ab - oracle::bottleneck_bruteforce(a, b)) <= 1e-12,
                      "bottleneck deviates from the exhaustive oracle");
        check.require(bottleneck(b, a) == ab, "bottleneck is not symmetric");
        check.require(bottleneck(a, a) == 0.0, "nonzero self distance");
        check.require(bottleneck(a, c) <= ab + bottleneck(b, c) + 1e-12,
                      "triangle inequality violated");
    }
    return check;
}

Check criterion_persistence_oracle() {
    Check check;
    auto graph_from = [](const std::vector<double>& values,
                         const std::vector<std::pair<int, int>>& edges) {
        MapperGraph graph;
        for (size_t i = 0; i < values.size(); ++i)
            graph.nodes.push_back({{static_cast<int>(i)}, values[i], 0});
        graph.edges = edges;
        return graph;
    };
    auto matches = [](const PersistenceDiagram& diagram,
                      std::vector<DiagramPoint> expected) {
        if (diagram.size() != expected.size()) return false;
        for (const auto& want : expected) {
            bool found = false;
            for (const auto& have : diagram)
                if (have.birth == want.birth && have.death == want.death && have.cls == want.cls)
                    found = true;
            if (!found) return false;
        }
        return true;
    };

    check.require(matches(persistence(graph_from({0.7}, {})),
                          {{0.7, 0.7, PersistenceClass::component}}),
                  "single-node diagram mismatch");
    check.require(matches(persistence(graph_from({0.0, 1.0, 2.0}, {{0, 1}, {1, 2}})),
                          {{0.0, 2.0, PersistenceClass::component}}),
                  "path diagram mismatch");
    check.require(matches(persistence(graph_from({0.0, 0.5, 2.0, 1.0}, {{0, 3}, {1, 3}, {2, 3}})),
                          {{0.0, 2.0, PersistenceClass::component},
                           {0.5, 1.0, PersistenceClass::branch}}),
                  "Y-graph diagram mismatch");
    return check;
}

Check criterion_rank_correlation_oracle() {
    Check check;
    for (size_t n = 2; n <= 6; ++n) {
        std::vector<int> identity(n);
        std::iota(identity.begin(), identity.end(), 0);
        std::vector<int> perm = identity;
        do {
            std::vector<double> a(identity.begin(), identity.end());
            std::vector<double> b(perm.begin(), perm.end());
            check.require(std::abs(spearman_values(a, b) -
                                   oracle::spearman_permutation(identity, perm)) <= 1e-12,
                          "spearman deviates from the oracle at n=" + std::to_string(n));
            check.require(std::abs(kendall_tau_b(a, b) -
                                   oracle::kendall_permutation(identity, perm)) <= 1e-12,
                          "kendall deviates from the oracle at n=" + std::to_string(n));
            check.require(std::abs(weighted_kendall_ranks(identity, perm) -
                                   oracle::weighted_kendall_naive(identity, perm)) <= 1e-12,
                          "weighted kendall deviates from the oracle at n=" + std::to_string(n));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }

    std::mt19937_64 gen(6);
    std::vector<int> identity(13);
    std::iota(identity.begin(), identity.end(), 0);
    std::vector<int> perm = identity;
    for (int trial = 0; trial < 100; ++trial) {
        std::shuffle(perm.begin(), perm.end(), gen);
        std::vector<double> a(identity.begin(), identity.end());
        std::vector<double> b(perm.begin(), perm.end());
        check.require(std::abs(spearman_values(a, b) -
                               oracle::spearman_permutation(identity, perm)) <= 1e-12,
                      "spearman deviates at n=13");
        check.require(std::abs(kendall_tau_b(a, b) -
                               oracle::kendall_permutation(identity, perm)) <= 1e-12,
                      "kendall deviates at n=13");
        check.require(std::abs(weighted_kendall_ranks(identity, perm) -
                               oracle::weighted_kendall_naive(identity, perm)) <= 1e-12,
                      "weighted kendall deviates at n=13");
    }
    return check;
}

Check criterion_pgi_contracts() {
    Check check;
    SyntheticSpec spec;
    spec.n_samples = 400;
    spec.n_features = 6;
    spec.seed = 8;
    const Dataset ds = standardize(generate_synthetic(spec));
    TrainConfig tc;
    tc.epochs = 60;
    tc.seed = 2;
    const DenseModel model = train(ds, tc, ArchTag::linear);
    const AttributionTable gt = ground_truth_linear(model, ds);

    // Identity perturbation.
    PerturbSpec identity;
    identity.sigma = 0.0;
    identity.flip_prob = 0.0;
    PgiConfig pgi_cfg;
    pgi_cfg.m = 5;
    check.require(pgi(model, ds, gt, identity, pgi_cfg).value == 0.0,
                  "PGI under the identity perturbation is nonzero");

    // Constant model.
    DenseModel constant;
    constant.tag = ArchTag::linear;
    constant.input_dim = 6;
    constant.layers.push_back(
        {Eigen::MatrixXd::Zero(1, 6), Eigen::VectorXd::Constant(1, 0.8473), Activation::identity});
    PerturbSpec noisy;
    noisy.seed = 3;
    check.require(pgi(constant, ds, gt, noisy, pgi_cfg).value == 0.0,
                  "PGI of a constant model is nonzero");

    // k-sweep: d points, k=d dominates k=1 with shared seeds.
    PerturbSpec sweep_spec;
    sweep_spec.numeric_mode = NumericMode::marginal;
    sweep_spec.seed = 4;
    PgiConfig sweep_cfg;
    sweep_cfg.m = 10;
    std::vector<int> ks;
    for (int k = 1; k <= 6; ++k) ks.push_back(k);
    const auto sweep = pgi_sweep(model, ds, gt, sweep_spec, ks, sweep_cfg);
    check.require(sweep.size() == 6, "sweep does not emit one point per k");
    check.require(sweep.back().second.value >= sweep.front().second.value,
                  "PGI at k=d is below PGI at k=1");
    return check;
}

Check criterion_determinism() {
    Check check;
    nlohmann::json config = {
        {"dataset", {{"synthetic", {{"n_samples", 150}, {"n_features", 6}, {"seed", 4}}},
                     {"name", "mini"}}},
        {"architectures", {"linear", "dense3"}},
        {"methods", {"integrated-gradients", "kernel-shap"}},
        {"baselines", {"constant-median", "training"}},
        {"repeats", 2},
        {"train", {{"epochs", 25}, {"hidden_widths", {12, 6}}}},
        {"kernel_shap", {{"n_coalitions", 128}}},
        {"perturb", {{"numeric_mode", "marginal"}}},
        {"pgi", {{"m", 4}}},
        {"tda", {{"resolution", 8}, {"bootstraps", 4}}},
        {"seed", 21},
    };

    auto run_into = [&](const fs::path& dir) {
        nlohmann::json c = config;
        c["out_dir"] = dir.string();
        const GridResult result = run_grid(ExperimentConfig::from_json(c));
        for (const auto& cell : result.cells)
            if (cell.status == CellStatus::failed)
                throw Error(ErrorCode::internal, cell.id + ": " + cell.message);
    };

    const fs::path a = workspace() / "det_a";
    const fs::path b = workspace() / "det_b";
    try {
        run_into(a);
        run_into(b);
    } catch (const std::exception& ex) {
        check.require(false, std::string("mini grid failed: ") + ex.what());
        return check;
    }

    std::map<fs::path, std::string> left, right;
    for (const auto& entry : fs::recursive_directory_iterator(a))
        if (entry.is_regular_file())
            left[fs::relative(entry.path(), a)] = read_text_file(entry.path());
    for (const auto& entry : fs::recursive_directory_iterator(b))
        if (entry.is_regular_file())
            right[fs::relative(entry.path(), b)] = read_text_file(entry.path());

    check.require(left.size() == right.size(), "bundle file sets differ");
    for (const auto& [rel, content] : left) {
        const auto it = right.find(rel);
        check.require(it != right.end() && it->second == content,
                      "bundle file differs: " + rel.string());
        if (!check.ok) break;
    }
    check.note(std::to_string(left.size()) + " files byte-identical");
    return check;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        std::function<Check()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "grid cardinality (39 dense3 / 42 linear tables, <= 10 min)", criterion_grid_cardinality},
        {2, "permutation experiment: ABC strictly increasing", criterion_abc_monotonic},
        {3, "permutation experiment: BND plateau then rise", criterion_bnd_plateau},
        {4, "linear ranking sanity: ground truth first, random last", criterion_ranking_sanity},
        {5, "metric disagreement measurable on dense3", criterion_metric_disagreement},
        {6, "integrated gradients correctness", criterion_ig_correctness},
        {7, "kernel SHAP matches brute-force Shapley", criterion_kernel_shap_oracle},
        {8, "bottleneck distance matches the exhaustive oracle", criterion_bottleneck_oracle},
        {9, "extended persistence hand cases", criterion_persistence_oracle},
        {10, "rank correlations match naive oracles", criterion_rank_correlation_oracle},
        {11, "PGI contracts (identity, constant model, k-sweep)", criterion_pgi_contracts},
        {12, "byte-identical report bundles under one fingerprint", criterion_determinism},
    };

    int failed = 0;
    for (const auto& criterion : criteria) {
        Check check;
        try {
            check = criterion.run();
        } catch (const std::exception& ex) {
            check.ok = false;
            check.detail = std::string("exception: ") + ex.what();
        }
        std::printf("[%s] criterion %2d: %s%s%s\n", check.ok ? "PASS" : "FAIL", criterion.id,
                    criterion.title, check.detail.empty() ? "" : " -- ", check.detail.c_str());
        std::fflush(stdout);
        failed += !check.ok;
    }

    if (failed > 0) std::printf("%d criterion(s) failed\n", failed);
    return failed == 0 ? 0 : 1;
}
