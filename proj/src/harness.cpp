#include "faithbench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "faithbench/io.hpp"
#include "faithbench/rng.hpp"
#include "faithbench/version.hpp"

namespace faithbench {

namespace {

// Pipeline stages in dependency order; each CLI command runs the prefix that
// ends at its stage, resuming whatever already exists.
enum class Stage { data = 0, models = 1, tables = 2, scores = 3, tda = 4, rank = 5 };

std::vector<std::string> correlation_names(const std::vector<CorrelationKind>& kinds) {
    std::vector<std::string> out;
    for (auto kind : kinds) out.push_back(correlation_kind_name(kind));
    return out;
}

int resolve_workers(int configured) {
    if (configured > 0) return configured;
    if (const char* env = std::getenv("FAITHBENCH_WORKERS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

template <class Fn>
void parallel_for(size_t count, int workers, Fn&& fn) {
    workers = std::min<int>(workers, static_cast<int>(count));
    if (workers <= 1) {
        for (size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (;;) {
                const size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

// One attribution cell identity within the grid.
struct TableSlot {
    MethodId method;
    std::optional<BaselineKind> baseline;
    int repeat = 0;

    std::string baseline_name() const {
        return baseline ? baseline_kind_name(*baseline) : "none";
    }
    std::string stem(const std::string& dataset, const std::string& arch) const {
        return dataset + "_" + arch + "_" + method.name() + "_" + baseline_name() + "_r" +
               std::to_string(repeat);
    }
};

std::vector<TableSlot> grid_slots(const ExperimentConfig& cfg, ArchTag arch) {
    std::vector<TableSlot> slots;
    for (const auto& method : cfg.methods)
        for (BaselineKind baseline : cfg.baselines)
            for (int rep = 0; rep < cfg.repeats; ++rep) slots.push_back({method, baseline, rep});
    for (int rep = 0; rep < cfg.repeats; ++rep)
        slots.push_back({{MethodId::Kind::random, ""}, std::nullopt, rep});
    if (arch == ArchTag::linear)
        for (int rep = 0; rep < cfg.repeats; ++rep)
            slots.push_back({{MethodId::Kind::ground_truth, ""}, std::nullopt, rep});
    return slots;
}

// Cell bookkeeping: a meta file per cell under .cells/ records the expected
// fingerprint and the relative output paths; a cell is resumable when the
// meta matches and every output exists.
struct CellStore {
    std::filesystem::path out_dir;
    std::string fingerprint;

    std::filesystem::path meta_path(const std::string& id) const {
        std::string safe = id;
        std::replace(safe.begin(), safe.end(), ':', '_');
        std::replace(safe.begin(), safe.end(), '|', '_');
        return out_dir / ".cells" / (safe + ".json");
    }

    bool complete(const std::string& id, const std::vector<std::string>& outputs) const {
        const auto meta = meta_path(id);
        if (!std::filesystem::exists(meta)) return false;
        nlohmann::json j = nlohmann::json::parse(read_text_file(meta), nullptr, false);
        if (j.is_discarded() || j.value("fingerprint", std::string()) != fingerprint) return false;
        const auto recorded = j.value("outputs", std::vector<std::string>());
        if (recorded != outputs) return false;
        for (const auto& rel : outputs)
            if (!std::filesystem::exists(out_dir / rel)) return false;
        return true;
    }

    void mark(const std::string& id, const std::vector<std::string>& outputs) const {
        write_json_file(meta_path(id),
                        nlohmann::json{{"id", id}, {"fingerprint", fingerprint}, {"outputs", outputs}});
    }
};

struct ScoreRow {
    std::string dataset;
    std::string metric;
    std::string method;
    std::string baseline;
    int repeat = 0;
    std::string k;  // empty for non-PGI metrics
    double value = 0.0;
};

std::string score_row_csv(const ScoreRow& row) {
    return row.dataset + "," + row.metric + "," + row.method + "," + row.baseline + "," +
           std::to_string(row.repeat) + "," + row.k + "," + format_double(row.value);
}

std::vector<MetricScore> scores_from_rows(const std::vector<ScoreRow>& rows,
                                          const std::string& metric) {
    std::vector<MetricScore> out;
    for (const auto& row : rows) {
        if (row.metric != metric) continue;
        MetricScore score;
        score.metric = metric == "PGI" ? MetricKind::pgi
                                       : (metric == "ABC" ? MetricKind::abc : MetricKind::bnd);
        score.direction = metric_direction(score.metric);
        score.value = row.value;
        score.table = {row.method, row.baseline, row.repeat};
        out.push_back(score);
    }
    return out;
}

std::vector<ScoreRow> parse_score_csv(const std::filesystem::path& path) {
    const CsvTable csv = read_csv(path);
    std::vector<ScoreRow> rows;
    for (const auto& fields : csv.rows) {
        require(fields.size() == 7, ErrorCode::parse, "bad score row in " + path.string());
        rows.push_back({fields[0], fields[1], fields[2], fields[3], std::stoi(fields[4]), fields[5],
                        std::stod(fields[6])});
    }
    return rows;
}

// In-memory state threaded through the stages of one run.
struct GridState {
    std::optional<Dataset> dataset;
    std::map<std::string, DenseModel> models;                       // by arch name
    std::map<std::string, std::vector<AttributionTable>> tables;    // by arch name, slot order
    std::map<std::string, std::vector<ScoreRow>> perturb_scores;    // by arch name
    std::map<std::string, std::vector<ScoreRow>> bnd_rows;          // by arch name
    std::map<std::string, bool> arch_failed;
};

GridSpec grid_spec_for(const ExperimentConfig& cfg) {
    GridSpec spec;
    spec.methods = cfg.methods;
    spec.baselines = cfg.baselines;
    spec.repeats = cfg.repeats;
    spec.baseline_k = cfg.baseline_k;
    spec.ig = cfg.ig;
    spec.kernel_shap = cfg.kernel_shap;
    spec.import_dir = cfg.import_dir;
    spec.master_seed = cfg.master_seed;
    return spec;
}

}  // namespace

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j;
    if (dataset.synthetic) {
        j["dataset"]["synthetic"] = dataset.synthetic->to_json();
    } else {
        j["dataset"]["csv"] = dataset.csv.string();
        j["dataset"]["schema"] = dataset.schema.string();
        j["dataset"]["label"] = dataset.label_column;
    }
    j["dataset"]["name"] = dataset.name;
    if (dataset.inject_random > 0) j["dataset"]["inject_random"] = dataset.inject_random;

    nlohmann::json archs = nlohmann::json::array();
    for (ArchTag tag : architectures) archs.push_back(arch_tag_name(tag));
    j["architectures"] = archs;

    nlohmann::json method_names = nlohmann::json::array();
    for (const auto& method : methods)
        method_names.push_back(method.kind == MethodId::Kind::imported ? "imported:" + method.label
                                                                       : method.name());
    j["methods"] = method_names;

    nlohmann::json baseline_names = nlohmann::json::array();
    for (BaselineKind kind : baselines) baseline_names.push_back(baseline_kind_name(kind));
    j["baselines"] = baseline_names;

    j["repeats"] = repeats;
    j["baseline_k"] = baseline_k;
    j["train"] = {{"epochs", train.epochs},
                  {"batch_size", train.batch_size},
                  {"learning_rate", train.learning_rate},
                  {"hidden_widths", train.hidden_widths},
                  {"seed", train.seed}};
    j["ig"] = {{"steps", ig.steps}};
    j["kernel_shap"] = {{"n_coalitions", kernel_shap.n_coalitions},
                        {"ridge", kernel_shap.ridge},
                        {"full_enumeration_max_dim", kernel_shap.full_enumeration_max_dim}};
    j["perturb"] = {{"numeric_mode", perturb.numeric_mode == NumericMode::gaussian ? "gaussian" : "marginal"},
                    {"sigma", perturb.sigma},
                    {"flip_prob", perturb.flip_prob}};
    j["pgi"] = {{"k", pgi.k},
                {"m", pgi.m},
                {"aggregate_categorical", pgi.aggregate_categorical},
                {"max_samples", pgi.max_samples}};
    if (!pgi_sweep_ks.empty()) j["pgi"]["sweep"] = pgi_sweep_ks;
    j["ablation"] = {{"aggregate_categorical", ablation.aggregate_categorical},
                     {"per_row", ablation.per_row},
                     {"cumulative", ablation.cumulative}};
    j["tda"] = {{"gain", tda.gain},
                {"histogram_bins", tda.histogram_bins},
                {"resolution_grid", tda.resolution_grid},
                {"bootstraps", tda.bootstraps}};
    if (tda.resolution) j["tda"]["resolution"] = *tda.resolution;
    j["correlations"] = correlation_names(correlations);
    if (!import_dir.empty()) j["import_dir"] = import_dir.string();
    j["out_dir"] = out_dir.string();
    j["seed"] = master_seed;
    if (workers > 0) j["workers"] = workers;
    j["permutation"] = {{"fractions", permutation_fractions}};
    return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    require(j.is_object(), ErrorCode::invalid_argument, "config must be a JSON object");

    if (j.contains("dataset")) {
        const auto& dj = j["dataset"];
        if (dj.contains("synthetic")) {
            cfg.dataset.synthetic = SyntheticSpec::from_json(dj["synthetic"]);
        } else if (dj.contains("csv")) {
            cfg.dataset.csv = dj["csv"].get<std::string>();
            require(dj.contains("schema"), ErrorCode::invalid_argument,
                    "csv datasets need a 'schema' sidecar path");
            cfg.dataset.schema = dj["schema"].get<std::string>();
            cfg.dataset.label_column = dj.value("label", std::string("label"));
        } else {
            cfg.dataset.synthetic = SyntheticSpec{};
        }
        cfg.dataset.name = dj.value("name", std::string(cfg.dataset.synthetic ? "synthetic" : "dataset"));
        cfg.dataset.inject_random = dj.value("inject_random", 0);
    } else {
        cfg.dataset.synthetic = SyntheticSpec{};
    }

    if (j.contains("architectures")) {
        cfg.architectures.clear();
        for (const auto& name : j["architectures"])
            cfg.architectures.push_back(arch_tag_from_name(name.get<std::string>()));
    }
    if (j.contains("methods")) {
        cfg.methods.clear();
        for (const auto& name : j["methods"]) cfg.methods.push_back(MethodId::parse(name.get<std::string>()));
    } else {
        cfg.methods = {{MethodId::Kind::integrated_gradients, ""}, {MethodId::Kind::kernel_shap, ""}};
    }
    if (j.contains("baselines")) {
        cfg.baselines.clear();
        for (const auto& name : j["baselines"])
            cfg.baselines.push_back(baseline_kind_from_name(name.get<std::string>()));
    }

    cfg.repeats = j.value("repeats", cfg.repeats);
    cfg.baseline_k = j.value("baseline_k", cfg.baseline_k);

    if (j.contains("train")) {
        const auto& tj = j["train"];
        cfg.train.epochs = tj.value("epochs", cfg.train.epochs);
        cfg.train.batch_size = tj.value("batch_size", cfg.train.batch_size);
        cfg.train.learning_rate = tj.value("learning_rate", cfg.train.learning_rate);
        if (tj.contains("hidden_widths")) {
            const auto widths = tj["hidden_widths"].get<std::vector<int>>();
            require(widths.size() == 2, ErrorCode::invalid_argument,
                    "hidden_widths must have exactly two entries");
            cfg.train.hidden_widths = {widths[0], widths[1]};
        }
    }
    if (j.contains("ig")) cfg.ig.steps = j["ig"].value("steps", cfg.ig.steps);
    if (j.contains("kernel_shap")) {
        const auto& kj = j["kernel_shap"];
        cfg.kernel_shap.n_coalitions = kj.value("n_coalitions", cfg.kernel_shap.n_coalitions);
        cfg.kernel_shap.ridge = kj.value("ridge", cfg.kernel_shap.ridge);
        cfg.kernel_shap.full_enumeration_max_dim =
            kj.value("full_enumeration_max_dim", cfg.kernel_shap.full_enumeration_max_dim);
    }
    if (j.contains("perturb")) {
        const auto& pj = j["perturb"];
        const std::string mode = pj.value("numeric_mode", std::string("gaussian"));
        require(mode == "gaussian" || mode == "marginal", ErrorCode::invalid_argument,
                "numeric_mode must be 'gaussian' or 'marginal'");
        cfg.perturb.numeric_mode = mode == "gaussian" ? NumericMode::gaussian : NumericMode::marginal;
        cfg.perturb.sigma = pj.value("sigma", cfg.perturb.sigma);
        cfg.perturb.flip_prob = pj.value("flip_prob", cfg.perturb.flip_prob);
    }
    if (j.contains("pgi")) {
        const auto& pj = j["pgi"];
        cfg.pgi.k = pj.value("k", cfg.pgi.k);
        cfg.pgi.m = pj.value("m", cfg.pgi.m);
        cfg.pgi.aggregate_categorical = pj.value("aggregate_categorical", cfg.pgi.aggregate_categorical);
        cfg.pgi.max_samples = pj.value("max_samples", cfg.pgi.max_samples);
        if (pj.contains("sweep")) cfg.pgi_sweep_ks = pj["sweep"].get<std::vector<int>>();
    }
    if (j.contains("ablation")) {
        const auto& aj = j["ablation"];
        cfg.ablation.aggregate_categorical =
            aj.value("aggregate_categorical", cfg.ablation.aggregate_categorical);
        cfg.ablation.per_row = aj.value("per_row", cfg.ablation.per_row);
        cfg.ablation.cumulative = aj.value("cumulative", cfg.ablation.cumulative);
    }
    if (j.contains("tda")) {
        const auto& tj = j["tda"];
        cfg.tda.gain = tj.value("gain", cfg.tda.gain);
        cfg.tda.histogram_bins = tj.value("histogram_bins", cfg.tda.histogram_bins);
        if (tj.contains("resolution_grid"))
            cfg.tda.resolution_grid = tj["resolution_grid"].get<std::vector<int>>();
        cfg.tda.bootstraps = tj.value("bootstraps", cfg.tda.bootstraps);
        if (tj.contains("resolution")) cfg.tda.resolution = tj["resolution"].get<int>();
    }
    if (j.contains("correlations")) {
        cfg.correlations.clear();
        for (const auto& name : j["correlations"]) {
            const std::string s = name.get<std::string>();
            if (s == "spearman") cfg.correlations.push_back(CorrelationKind::spearman);
            else if (s == "kendall") cfg.correlations.push_back(CorrelationKind::kendall);
            else if (s == "weighted-kendall") cfg.correlations.push_back(CorrelationKind::weighted_kendall);
            else raise(ErrorCode::invalid_argument, "unknown correlation kind: " + s);
        }
    }
    if (j.contains("import_dir")) cfg.import_dir = j["import_dir"].get<std::string>();
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
    cfg.master_seed = j.value("seed", cfg.master_seed);
    cfg.workers = j.value("workers", cfg.workers);
    if (j.contains("permutation") && j["permutation"].contains("fractions"))
        cfg.permutation_fractions = j["permutation"]["fractions"].get<std::vector<double>>();

    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    require(!architectures.empty(), ErrorCode::invalid_argument, "no architectures configured");
    require(!methods.empty(), ErrorCode::invalid_argument, "no attribution methods configured");
    require(!baselines.empty(), ErrorCode::invalid_argument, "no baselines configured");
    require(repeats >= 1, ErrorCode::invalid_argument, "repeats must be at least 1");
    require(baseline_k >= 1, ErrorCode::invalid_argument, "baseline_k must be at least 1");
    require(ig.steps >= 2, ErrorCode::invalid_argument, "ig.steps must be at least 2");
    require(!out_dir.empty(), ErrorCode::invalid_argument, "out_dir must not be empty");
    train.validate();
    perturb.validate();
    require(tda.gain >= 0.3 && tda.gain <= 0.5, ErrorCode::invalid_argument,
            "tda.gain must lie in [0.3, 0.5]");
    require(!tda.resolution_grid.empty(), ErrorCode::invalid_argument,
            "tda.resolution_grid must not be empty");
    for (int r : tda.resolution_grid)
        require(r >= 2, ErrorCode::invalid_argument, "tda resolutions must be at least 2");
    require(tda.bootstraps >= 1, ErrorCode::invalid_argument, "tda.bootstraps must be at least 1");
    bool imported = false;
    for (const auto& method : methods) imported |= method.kind == MethodId::Kind::imported;
    require(!imported || !import_dir.empty(), ErrorCode::invalid_argument,
            "imported methods need an import_dir");
    require(std::is_sorted(permutation_fractions.begin(), permutation_fractions.end()),
            ErrorCode::invalid_argument, "permutation fractions must be sorted ascending");
    for (double f : permutation_fractions)
        require(f >= 0.0 && f <= 1.0, ErrorCode::invalid_argument,
                "permutation fractions must lie in [0, 1]");
}

std::string ExperimentConfig::fingerprint() const {
    nlohmann::json j = to_json();
    j.erase("out_dir");  // runs into different directories share a fingerprint
    j.erase("workers");
    Fnv1a h;
    h.update(std::string(kVersion));
    h.update(j.dump());
    return h.hex();
}

void PermutationExperiment::validate() const {
    require(!fractions.empty(), ErrorCode::invalid_argument, "no permutation fractions");
    require(std::is_sorted(fractions.begin(), fractions.end()), ErrorCode::invalid_argument,
            "permutation fractions must be sorted ascending");
    for (double f : fractions)
        require(f >= 0.0 && f <= 1.0, ErrorCode::invalid_argument,
                "permutation fractions must lie in [0, 1]");
    require(repeats >= 1, ErrorCode::invalid_argument, "permutation repeats must be at least 1");
}

AttributionTable permute_rows(const AttributionTable& table, double fraction, uint64_t seed) {
    require(fraction >= 0.0 && fraction <= 1.0, ErrorCode::invalid_argument,
            "fraction must lie in [0, 1]");
    AttributionTable out = table;
    const size_t n = static_cast<size_t>(table.values.rows());
    const size_t count = static_cast<size_t>(std::floor(fraction * static_cast<double>(n)));
    if (count < 2) return out;  // a single selected row cannot move under a cyclic shift

    Rng rng(derive_seed(seed, "permute-rows"));
    const auto chosen = rng.sample_without_replacement(n, count);
    // Cyclic shift along the selection order: row chosen[i] receives the
    // values of chosen[i+1], so every chosen row moves.
    for (size_t i = 0; i < count; ++i) {
        const size_t src = chosen[(i + 1) % count];
        out.values.row(static_cast<Eigen::Index>(chosen[i])) =
            table.values.row(static_cast<Eigen::Index>(src));
    }
    return out;
}

std::vector<PermutationResultRow> run_permutation_experiment(const ExperimentConfig& cfg,
                                                             const PermutationExperiment& exp) {
    exp.validate();
    require(cfg.dataset.synthetic.has_value(), ErrorCode::invalid_argument,
            "the permutation experiment runs on the synthetic dataset");

    SyntheticSpec spec = *cfg.dataset.synthetic;
    if (spec.seed == 0) spec.seed = derive_seed(cfg.master_seed, "data");
    const Dataset ds = standardize(generate_synthetic(spec));

    TrainConfig train_cfg = cfg.train;
    train_cfg.seed = derive_seed(cfg.master_seed, "train:linear");
    const DenseModel model = train(ds, train_cfg, ArchTag::linear);

    const AttributionTable base = ground_truth_linear(model, ds);
    const Eigen::VectorXd preds = model.predict_batch(ds.X);
    std::vector<double> lens(preds.data(), preds.data() + preds.size());

    // Permuted tables per (fraction, repeat). The seed is shared across
    // fractions within a repeat, which nests the selected row sets: the rows
    // misaligned at fraction f stay misaligned at every larger fraction, so
    // the fraction acts as a clean dose.
    std::vector<std::vector<AttributionTable>> permuted(exp.fractions.size());
    for (size_t f = 0; f < exp.fractions.size(); ++f) {
        for (int rep = 0; rep < exp.repeats; ++rep) {
            const uint64_t seed = derive_seed(exp.seed, "repeat", static_cast<uint64_t>(rep));
            permuted[f].push_back(permute_rows(base, exp.fractions[f], seed));
        }
    }

    // Resolution: pinned, or selected over the whole permuted family plus the
    // base cloud, mirroring the grid's all-candidates selection. The clouds
    // stay in their native units here: every candidate is a permutation of
    // the same table, so the cross-method unit correction does not apply and
    // would whiten away the very structure being compared.
    MapperConfig mapper_cfg;
    mapper_cfg.gain = cfg.tda.gain;
    mapper_cfg.histogram_bins = cfg.tda.histogram_bins;
    int resolution;
    if (cfg.tda.resolution) {
        resolution = *cfg.tda.resolution;
    } else {
        std::vector<Eigen::MatrixXd> clouds;
        clouds.push_back(base.values);
        for (const auto& per_fraction : permuted)
            for (const auto& table : per_fraction) clouds.push_back(table.values);
        resolution = select_resolution(clouds, lens, cfg.tda.resolution_grid, cfg.tda.bootstraps,
                                       derive_seed(cfg.master_seed, "permute-tda"));
    }
    mapper_cfg.resolution = resolution;
    const PersistenceDiagram base_diagram = diagram_for_cloud(base.values, lens, mapper_cfg);

    std::vector<PermutationResultRow> rows;
    for (size_t f = 0; f < exp.fractions.size(); ++f) {
        for (int rep = 0; rep < exp.repeats; ++rep) {
            const AttributionTable& table = permuted[f][static_cast<size_t>(rep)];

            PerturbSpec perturb_spec = cfg.perturb;
            perturb_spec.seed = derive_seed(cfg.master_seed, "permute-pgi", static_cast<uint64_t>(rep));
            PgiConfig pgi_cfg = cfg.pgi;
            pgi_cfg.seed = derive_seed(cfg.master_seed, "permute-pgi-rows", static_cast<uint64_t>(rep));
            rows.push_back({exp.fractions[f], rep, "PGI",
                            pgi(model, ds, table, perturb_spec, pgi_cfg).value});

            // Row permutation only misaligns per-row orders, so the ablation
            // here ranks each row by its own attributions.
            AblationConfig abl_cfg = cfg.ablation;
            abl_cfg.per_row = true;
            PerturbSpec abl_spec = cfg.perturb;
            abl_spec.seed = derive_seed(cfg.master_seed, "permute-abc", static_cast<uint64_t>(rep));
            rows.push_back({exp.fractions[f], rep, "ABC",
                            ablation_curve(model, ds, table, abl_spec, abl_cfg).auc});

            const PersistenceDiagram diagram = diagram_for_cloud(table.values, lens, mapper_cfg);
            rows.push_back({exp.fractions[f], rep, "BND", bottleneck(diagram, base_diagram)});
        }
    }
    return rows;
}

bool GridResult::any_failed() const {
    return std::any_of(cells.begin(), cells.end(),
                       [](const CellResult& c) { return c.status == CellStatus::failed; });
}

namespace {

// Staged grid executor shared by run_grid and the single-stage commands.
GridResult run_stages(const ExperimentConfig& cfg, Stage last_stage) {
    cfg.validate();
    const int workers = resolve_workers(cfg.workers);
    const CellStore store{cfg.out_dir, cfg.fingerprint()};
    std::filesystem::create_directories(cfg.out_dir / ".cells");

    GridResult result;
    GridState state;
    std::mutex result_mutex;

    const std::string ds_name = cfg.dataset.name;
    auto record = [&](const std::string& id, CellStatus status, const std::string& message = "") {
        std::lock_guard<std::mutex> lock(result_mutex);
        result.cells.push_back({id, status, message});
    };

    // ---- data ----
    {
        const std::string id = "data:" + ds_name;
        const std::vector<std::string> outputs{"data/" + ds_name + ".csv",
                                               "data/" + ds_name + ".schema.json"};
        try {
            if (store.complete(id, outputs)) {
                state.dataset = load_dataset(cfg.out_dir / outputs[0], cfg.out_dir / outputs[1]);
                record(id, CellStatus::skipped);
            } else {
                Dataset ds = [&]() {
                    if (cfg.dataset.synthetic) {
                        SyntheticSpec spec = *cfg.dataset.synthetic;
                        if (spec.seed == 0) spec.seed = derive_seed(cfg.master_seed, "data");
                        return generate_synthetic(spec);
                    }
                    return load_csv(cfg.dataset.csv, FeatureSchema::from_json(read_json_file(cfg.dataset.schema)),
                                    cfg.dataset.label_column, derive_seed(cfg.master_seed, "split"));
                }();
                ds = standardize(ds);
                if (cfg.dataset.inject_random > 0)
                    ds = inject_random_features(ds, cfg.dataset.inject_random,
                                                derive_seed(cfg.master_seed, "inject"));
                save_dataset(ds, cfg.out_dir / outputs[0], cfg.out_dir / outputs[1]);
                store.mark(id, outputs);
                state.dataset = std::move(ds);
                record(id, CellStatus::computed);
            }
        } catch (const std::exception& ex) {
            record(id, CellStatus::failed, ex.what());
        }
    }

    // ---- models ----
    if (last_stage >= Stage::models && state.dataset) {
        for (ArchTag arch : cfg.architectures) {
            const std::string arch_name = arch_tag_name(arch);
            const std::string id = "model:" + ds_name + ":" + arch_name;
            const std::vector<std::string> outputs{"models/" + ds_name + "_" + arch_name + ".json"};
            try {
                if (store.complete(id, outputs)) {
                    state.models[arch_name] = load_model(cfg.out_dir / outputs[0]);
                    record(id, CellStatus::skipped);
                } else {
                    TrainConfig train_cfg = cfg.train;
                    train_cfg.seed = derive_seed(cfg.master_seed, "train:" + arch_name);
                    DenseModel model = train(*state.dataset, train_cfg, arch);
                    save_model(model, cfg.out_dir / outputs[0]);
                    store.mark(id, outputs);
                    state.models[arch_name] = std::move(model);
                    record(id, CellStatus::computed);
                }
            } catch (const std::exception& ex) {
                record(id, CellStatus::failed, ex.what());
                state.arch_failed[arch_name] = true;
            }
        }
    }

    // ---- attribution tables ----
    if (last_stage >= Stage::tables && state.dataset) {
        const GridSpec spec = grid_spec_for(cfg);
        for (ArchTag arch : cfg.architectures) {
            const std::string arch_name = arch_tag_name(arch);
            if (!state.models.count(arch_name)) continue;
            const DenseModel& model = state.models[arch_name];
            const auto slots = grid_slots(cfg, arch);
            auto& table_list = state.tables[arch_name];
            table_list.resize(slots.size());
            std::vector<char> ok(slots.size(), 0);

            parallel_for(slots.size(), workers, [&](size_t s) {
                const TableSlot& slot = slots[s];
                const std::string stem = slot.stem(ds_name, arch_name);
                const std::string id = "table:" + ds_name + ":" + arch_name + ":" +
                                       slot.method.name() + ":" + slot.baseline_name() + ":r" +
                                       std::to_string(slot.repeat);
                const std::vector<std::string> outputs{"attributions/" + stem + ".csv",
                                                       "attributions/" + stem + ".json"};
                try {
                    if (store.complete(id, outputs)) {
                        table_list[s] = import_table(cfg.out_dir / outputs[0],
                                                     cfg.out_dir / outputs[1], *state.dataset);
                        // Re-imported cells keep their original method identity.
                        table_list[s].method = slot.method;
                        table_list[s].baseline = slot.baseline;
                        ok[s] = 1;
                        record(id, CellStatus::skipped);
                    } else {
                        table_list[s] = generate_table(*state.dataset, model, spec, slot.method,
                                                       slot.baseline, slot.repeat);
                        save_table(table_list[s], state.dataset->schema, cfg.out_dir / outputs[0],
                                   cfg.out_dir / outputs[1]);
                        store.mark(id, outputs);
                        ok[s] = 1;
                        record(id, CellStatus::computed);
                    }
                } catch (const std::exception& ex) {
                    record(id, CellStatus::failed, ex.what());
                }
            });

            if (std::count(ok.begin(), ok.end(), 1) != static_cast<long>(slots.size()))
                state.arch_failed[arch_name] = true;
        }
    }

    // ---- perturbation metric scores ----
    if (last_stage >= Stage::scores && state.dataset) {
        for (ArchTag arch : cfg.architectures) {
            const std::string arch_name = arch_tag_name(arch);
            if (!state.models.count(arch_name) || state.arch_failed[arch_name]) continue;
            const std::string id = "scores:" + ds_name + ":" + arch_name;
            const std::string prefix = "scores/" + ds_name + "_" + arch_name;
            std::vector<std::string> outputs{prefix + "_perturb.csv", prefix + "_ablation_curves.csv"};
            if (!cfg.pgi_sweep_ks.empty()) outputs.push_back(prefix + "_pgi_sweep.csv");
            if (state.dataset->random_feature_columns().size() > 0)
                outputs.push_back(prefix + "_random_cutoff.csv");
            try {
                if (store.complete(id, outputs)) {
                    state.perturb_scores[arch_name] = parse_score_csv(cfg.out_dir / outputs[0]);
                    record(id, CellStatus::skipped);
                } else {
                    const DenseModel& model = state.models[arch_name];
                    const auto& tables = state.tables[arch_name];
                    std::vector<ScoreRow> rows(tables.size() * 2);
                    std::vector<std::string> curve_rows(tables.size());
                    std::vector<std::string> sweep_rows(tables.size());

                    parallel_for(tables.size(), workers, [&](size_t t) {
                        const AttributionTable& table = tables[t];
                        const TableKey key = table_key(table);

                        // Draw streams are shared across tables: scores become
                        // paired comparisons, so near-tied tables differ by
                        // their selections rather than by the luck of the
                        // perturbation draws.
                        PerturbSpec spec = cfg.perturb;
                        spec.seed = derive_seed(cfg.master_seed, "pgi:" + arch_name);
                        PgiConfig pgi_cfg = cfg.pgi;
                        pgi_cfg.seed = derive_seed(cfg.master_seed, "pgi-rows:" + arch_name);
                        const MetricScore pgi_score = pgi(model, *state.dataset, table, spec, pgi_cfg);
                        const auto units =
                            perturb_units(state.dataset->schema, pgi_cfg.aggregate_categorical);
                        const int k_used = pgi_cfg.k > 0
                                               ? pgi_cfg.k
                                               : std::max(1, static_cast<int>(std::lround(
                                                                 0.25 * static_cast<double>(units.size()))));
                        rows[2 * t] = {ds_name, "PGI", key.method, key.baseline, key.repeat,
                                       std::to_string(k_used), pgi_score.value};

                        PerturbSpec abl_spec = cfg.perturb;
                        abl_spec.seed = derive_seed(cfg.master_seed, "abc:" + arch_name);
                        AblationConfig abl_cfg = cfg.ablation;
                        const AblationCurve curve =
                            ablation_curve(model, *state.dataset, table, abl_spec, abl_cfg);
                        rows[2 * t + 1] = {ds_name, "ABC", key.method, key.baseline, key.repeat, "",
                                           curve.auc};

                        std::ostringstream curve_csv;
                        for (size_t s = 0; s < curve.performance.size(); ++s)
                            curve_csv << ds_name << ',' << key.method << ',' << key.baseline << ','
                                      << key.repeat << ',' << curve.steps[s] << ','
                                      << format_double(curve.performance[s]) << '\n';
                        curve_rows[t] = curve_csv.str();

                        if (!cfg.pgi_sweep_ks.empty()) {
                            const auto sweep = pgi_sweep(model, *state.dataset, table, spec,
                                                         cfg.pgi_sweep_ks, pgi_cfg);
                            std::ostringstream sweep_csv;
                            for (const auto& [k, score] : sweep)
                                sweep_csv << ds_name << ",PGI," << key.method << ',' << key.baseline
                                          << ',' << key.repeat << ',' << k << ','
                                          << format_double(score.value) << '\n';
                            sweep_rows[t] = sweep_csv.str();
                        }
                    });

                    std::ostringstream perturb_csv;
                    perturb_csv << "dataset,metric,method,baseline,repeat,k,value\n";
                    for (const auto& row : rows) perturb_csv << score_row_csv(row) << '\n';
                    write_text_file(cfg.out_dir / outputs[0], perturb_csv.str());

                    std::ostringstream curves_csv;
                    curves_csv << "dataset,method,baseline,repeat,step,auroc\n";
                    for (const auto& chunk : curve_rows) curves_csv << chunk;
                    write_text_file(cfg.out_dir / outputs[1], curves_csv.str());

                    if (!cfg.pgi_sweep_ks.empty()) {
                        std::ostringstream sweep_csv;
                        sweep_csv << "dataset,metric,method,baseline,repeat,k,value\n";
                        for (const auto& chunk : sweep_rows) sweep_csv << chunk;
                        write_text_file(cfg.out_dir / (prefix + "_pgi_sweep.csv"), sweep_csv.str());
                    }

                    if (!state.dataset->random_feature_columns().empty()) {
                        const double cutoff = random_feature_cutoff(state.tables[arch_name], *state.dataset);
                        write_text_file(cfg.out_dir / (prefix + "_random_cutoff.csv"),
                                        "dataset,architecture,cutoff\n" + ds_name + "," + arch_name +
                                            "," + format_double(cutoff) + "\n");
                    }

                    store.mark(id, outputs);
                    state.perturb_scores[arch_name] = rows;
                    record(id, CellStatus::computed);
                }
            } catch (const std::exception& ex) {
                record(id, CellStatus::failed, ex.what());
                state.arch_failed[arch_name] = true;
            }
        }
    }

    // ---- TDA / BND ----
    if (last_stage >= Stage::tda && state.dataset) {
        for (ArchTag arch : cfg.architectures) {
            const std::string arch_name = arch_tag_name(arch);
            if (!state.models.count(arch_name) || !state.tables.count(arch_name)) continue;
            if (state.tables[arch_name].empty() || state.arch_failed[arch_name]) continue;
            const std::string id = "tda:" + ds_name + ":" + arch_name;
            const std::string prefix = "tda/" + ds_name + "_" + arch_name;
            std::vector<std::string> outputs{prefix + "_bnd_scores.csv", prefix + "_resolution.json",
                                             prefix + "_diagrams.csv", prefix + "_mappers.json",
                                             prefix + "_stability.csv"};
            for (int rep = 0; rep < cfg.repeats; ++rep)
                outputs.push_back(prefix + "_bnd_matrix_r" + std::to_string(rep) + ".csv");
            try {
                if (store.complete(id, outputs)) {
                    state.bnd_rows[arch_name] = parse_score_csv(cfg.out_dir / outputs[0]);
                    record(id, CellStatus::skipped);
                    continue;
                }
                const DenseModel& model = state.models[arch_name];
                const auto& tables = state.tables[arch_name];

                const Eigen::VectorXd preds = model.predict_batch(state.dataset->X);
                std::vector<double> lens(preds.data(), preds.data() + preds.size());

                std::vector<Eigen::MatrixXd> clouds;
                clouds.reserve(tables.size());
                for (const auto& table : tables) clouds.push_back(standardize_cloud(table.values));

                int resolution;
                std::vector<StabilityRecord> records;
                if (cfg.tda.resolution) {
                    resolution = *cfg.tda.resolution;
                } else {
                    resolution = select_resolution(clouds, lens, cfg.tda.resolution_grid,
                                                   cfg.tda.bootstraps,
                                                   derive_seed(cfg.master_seed, "tda:" + arch_name),
                                                   &records);
                }

                std::ostringstream stability_csv;
                stability_csv << "candidate,method,baseline,repeat,resolution,stability\n";
                for (const auto& rec : records) {
                    const TableKey key = table_key(tables[static_cast<size_t>(rec.candidate)]);
                    stability_csv << rec.candidate << ',' << key.method << ',' << key.baseline << ','
                                  << key.repeat << ',' << rec.resolution << ','
                                  << format_double(rec.stability) << '\n';
                }
                write_text_file(cfg.out_dir / (prefix + "_stability.csv"), stability_csv.str());
                write_json_file(cfg.out_dir / (prefix + "_resolution.json"),
                                nlohmann::json{{"resolution", resolution},
                                               {"selected", !cfg.tda.resolution.has_value()}});

                // Per-repeat candidate sets: one BND matrix and score column
                // per repeat.
                MapperConfig mapper_cfg;
                mapper_cfg.resolution = resolution;
                mapper_cfg.gain = cfg.tda.gain;
                mapper_cfg.histogram_bins = cfg.tda.histogram_bins;

                std::vector<ScoreRow> bnd_rows;
                std::ostringstream diagrams_csv;
                diagrams_csv << "method,baseline,repeat,birth,death,class\n";
                nlohmann::json mappers = nlohmann::json::object();

                for (int rep = 0; rep < cfg.repeats; ++rep) {
                    std::vector<const AttributionTable*> repeat_tables;
                    std::vector<size_t> indices;
                    for (size_t t = 0; t < tables.size(); ++t) {
                        if (tables[t].repeat == rep) {
                            repeat_tables.push_back(&tables[t]);
                            indices.push_back(t);
                        }
                    }
                    if (repeat_tables.size() < 2) continue;

                    Eigen::MatrixXd matrix;
                    const auto scores = bnd_scores(repeat_tables, lens, resolution, &matrix);
                    for (const auto& score : scores)
                        bnd_rows.push_back({ds_name, "BND", score.table.method, score.table.baseline,
                                            score.table.repeat, "", score.value});

                    std::ostringstream matrix_csv;
                    matrix_csv << "candidate";
                    for (const auto* table : repeat_tables)
                        matrix_csv << ',' << table_key(*table).candidate();
                    matrix_csv << '\n';
                    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
                        matrix_csv << table_key(*repeat_tables[static_cast<size_t>(i)]).candidate();
                        for (Eigen::Index j = 0; j < matrix.cols(); ++j)
                            matrix_csv << ',' << format_double(matrix(i, j));
                        matrix_csv << '\n';
                    }
                    write_text_file(cfg.out_dir / (prefix + "_bnd_matrix_r" + std::to_string(rep) + ".csv"),
                                    matrix_csv.str());

                    for (size_t t = 0; t < repeat_tables.size(); ++t) {
                        const TableKey key = table_key(*repeat_tables[t]);
                        const MapperGraph graph =
                            build_mapper(clouds[indices[t]], lens, mapper_cfg);
                        mappers[key.candidate() + "|r" + std::to_string(rep)] =
                            mapper_graph_to_json(graph);
                        for (const auto& point : persistence(graph)) {
                            const char* cls = point.cls == PersistenceClass::component
                                                  ? "component"
                                                  : (point.cls == PersistenceClass::branch ? "branch"
                                                                                           : "loop");
                            diagrams_csv << key.method << ',' << key.baseline << ',' << key.repeat
                                         << ',' << format_double(point.birth) << ','
                                         << format_double(point.death) << ',' << cls << '\n';
                        }
                    }
                }

                std::ostringstream bnd_csv;
                bnd_csv << "dataset,metric,method,baseline,repeat,k,value\n";
                for (const auto& row : bnd_rows) bnd_csv << score_row_csv(row) << '\n';
                write_text_file(cfg.out_dir / outputs[0], bnd_csv.str());
                write_text_file(cfg.out_dir / (prefix + "_diagrams.csv"), diagrams_csv.str());
                write_json_file(cfg.out_dir / (prefix + "_mappers.json"), mappers);

                store.mark(id, outputs);
                state.bnd_rows[arch_name] = std::move(bnd_rows);
                record(id, CellStatus::computed);
            } catch (const std::exception& ex) {
                record(id, CellStatus::failed, ex.what());
            }
        }
    }

    // ---- rankings, agreement, report ----
    if (last_stage >= Stage::rank && state.dataset) {
        for (ArchTag arch : cfg.architectures) {
            const std::string arch_name = arch_tag_name(arch);
            if (!state.perturb_scores.count(arch_name)) continue;
            const std::string id = "rank:" + ds_name + ":" + arch_name;
            const std::string prefix = "rank/" + ds_name + "_" + arch_name;
            const bool have_bnd = state.bnd_rows.count(arch_name) > 0;

            std::vector<std::string> outputs{prefix + "_rankings.csv", prefix + "_anomalies.json",
                                             prefix + "_top3.csv"};
            std::vector<std::string> metric_names{"PGI", "ABC"};
            if (have_bnd) metric_names.push_back("BND");
            for (size_t i = 0; i < metric_names.size(); ++i)
                for (size_t j = i + 1; j < metric_names.size(); ++j)
                    outputs.push_back(prefix + "_slope_" + metric_names[i] + "_" + metric_names[j] +
                                      ".csv");
            for (const char* kind : {"spearman", "kendall", "weighted-kendall"}) {
                outputs.push_back(prefix + "_agreement_" + kind + ".csv");
                outputs.push_back(prefix + "_agreement_" + kind + "_per_repeat.csv");
            }

            try {
                if (store.complete(id, outputs)) {
                    const nlohmann::json saved =
                        read_json_file(cfg.out_dir / (prefix + "_anomalies.json"));
                    {
                        std::lock_guard<std::mutex> lock(result_mutex);
                        for (const auto& a : saved.value("anomalies", std::vector<std::string>()))
                            result.anomalies.push_back(a);
                    }
                    record(id, CellStatus::skipped);
                    continue;
                }
                const auto& perturb_rows = state.perturb_scores[arch_name];

                std::vector<Ranking> rankings;
                rankings.push_back(rank_candidates(scores_from_rows(perturb_rows, "PGI")));
                rankings.push_back(rank_candidates(scores_from_rows(perturb_rows, "ABC")));
                if (have_bnd)
                    rankings.push_back(
                        rank_candidates(scores_from_rows(state.bnd_rows[arch_name], "BND")));

                ReportBundle bundle;
                bundle.rankings = rankings;
                bundle.aggregated = agreement(rankings);

                // Second reading of the agreement average: correlations per
                // repeat, then the mean over repeats.
                {
                    std::vector<AgreementMatrix> per_repeat;
                    for (int rep = 0; rep < cfg.repeats; ++rep) {
                        auto filter = [&](const std::vector<ScoreRow>& rows, const std::string& metric) {
                            std::vector<ScoreRow> subset;
                            for (const auto& row : rows)
                                if (row.repeat == rep) subset.push_back(row);
                            return scores_from_rows(subset, metric);
                        };
                        std::vector<Ranking> repeat_rankings;
                        repeat_rankings.push_back(rank_candidates(filter(perturb_rows, "PGI")));
                        repeat_rankings.push_back(rank_candidates(filter(perturb_rows, "ABC")));
                        if (have_bnd)
                            repeat_rankings.push_back(
                                rank_candidates(filter(state.bnd_rows[arch_name], "BND")));
                        per_repeat.push_back(agreement(repeat_rankings));
                    }
                    AgreementMatrix mean = per_repeat.front();
                    for (auto& [kind, cells] : mean.values) {
                        for (size_t i = 0; i < cells.size(); ++i)
                            for (size_t j = 0; j < cells[i].size(); ++j) {
                                double sum = 0.0;
                                for (const auto& m : per_repeat) sum += m.values.at(kind)[i][j];
                                cells[i][j] = sum / static_cast<double>(per_repeat.size());
                            }
                    }
                    bundle.per_repeat_mean = std::move(mean);
                }

                std::ostringstream rankings_csv;
                rankings_csv << "dataset,metric,rank,method,baseline,score\n";
                for (const auto& ranking : rankings) {
                    for (size_t i = 0; i < ranking.ordered.size(); ++i) {
                        const auto& name = ranking.ordered[i];
                        const auto sep = name.find('|');
                        rankings_csv << ds_name << ',' << metric_kind_name(ranking.metric) << ',' << i
                                     << ',' << name.substr(0, sep) << ',' << name.substr(sep + 1)
                                     << ',' << format_double(ranking.scores[i]) << '\n';
                    }
                }
                write_text_file(cfg.out_dir / outputs[0], rankings_csv.str());
                write_report_artifacts(cfg.out_dir / "rank", ds_name, arch_name, bundle);

                // Anomaly flag: every off-diagonal entry above 0.9 in some
                // correlation kind means the metrics unexpectedly agree.
                std::vector<std::string> anomalies;
                for (const auto& [kind, cells] : bundle.aggregated.values) {
                    bool found_low = false;
                    for (size_t i = 0; i < cells.size(); ++i)
                        for (size_t j = 0; j < cells[i].size(); ++j)
                            if (i != j && cells[i][j] < 0.9) found_low = true;
                    if (!found_low)
                        anomalies.push_back("all " + correlation_kind_name(kind) +
                                            " agreement entries exceed 0.9 for " + ds_name + "/" +
                                            arch_name);
                }
                write_json_file(cfg.out_dir / (prefix + "_anomalies.json"),
                                nlohmann::json{{"anomalies", anomalies}});
                {
                    std::lock_guard<std::mutex> lock(result_mutex);
                    for (const auto& a : anomalies) result.anomalies.push_back(a);
                }

                store.mark(id, outputs);
                record(id, CellStatus::computed);
            } catch (const std::exception& ex) {
                record(id, CellStatus::failed, ex.what());
            }
        }
    }

    // ---- manifest ----
    std::sort(result.cells.begin(), result.cells.end(),
              [](const CellResult& a, const CellResult& b) { return a.id < b.id; });
    std::sort(result.anomalies.begin(), result.anomalies.end());

    nlohmann::json manifest;
    manifest["version"] = kVersion;
    manifest["fingerprint"] = store.fingerprint;
    nlohmann::json config_echo = cfg.to_json();
    config_echo.erase("out_dir");
    config_echo.erase("workers");
    manifest["config"] = config_echo;
    manifest["datasets"] = {ds_name};
    nlohmann::json archs = nlohmann::json::array();
    for (ArchTag tag : cfg.architectures) archs.push_back(arch_tag_name(tag));
    manifest["architectures"] = archs;
    manifest["metrics"] = {"PGI", "ABC", "BND"};
    manifest["correlations"] = correlation_names(cfg.correlations);
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : result.cells) {
        nlohmann::json c{{"id", cell.id}, {"ok", cell.status != CellStatus::failed}};
        if (cell.status == CellStatus::failed) c["error"] = cell.message;
        cells.push_back(std::move(c));
    }
    manifest["cells"] = std::move(cells);
    manifest["anomalies"] = result.anomalies;
    write_json_file(cfg.out_dir / "manifest.json", manifest);

    return result;
}

void throw_on_failure(const GridResult& result) {
    if (!result.any_failed()) return;
    std::string message = "failed cells:";
    for (const auto& cell : result.cells)
        if (cell.status == CellStatus::failed) message += " " + cell.id + " (" + cell.message + ");";
    raise(ErrorCode::internal, message);
}

}  // namespace

GridResult run_grid(const ExperimentConfig& cfg) { return run_stages(cfg, Stage::rank); }

void cmd_synth(const ExperimentConfig& cfg) {
    require(cfg.dataset.synthetic.has_value(), ErrorCode::invalid_argument,
            "synth requires a synthetic dataset config");
    throw_on_failure(run_stages(cfg, Stage::data));
}

void cmd_train(const ExperimentConfig& cfg) { throw_on_failure(run_stages(cfg, Stage::models)); }

void cmd_explain(const ExperimentConfig& cfg) { throw_on_failure(run_stages(cfg, Stage::tables)); }

void cmd_score(const ExperimentConfig& cfg) { throw_on_failure(run_stages(cfg, Stage::scores)); }

void cmd_tda(const ExperimentConfig& cfg) { throw_on_failure(run_stages(cfg, Stage::tda)); }

void cmd_rank(const ExperimentConfig& cfg) { throw_on_failure(run_stages(cfg, Stage::rank)); }

GridResult cmd_grid(const ExperimentConfig& cfg) { return run_grid(cfg); }

void cmd_report(const ExperimentConfig& cfg) { throw_on_failure(run_stages(cfg, Stage::rank)); }

void cmd_permute_exp(const ExperimentConfig& cfg) {
    PermutationExperiment exp;
    exp.fractions = cfg.permutation_fractions;
    exp.repeats = cfg.repeats;
    exp.seed = derive_seed(cfg.master_seed, "permutation");
    const auto rows = run_permutation_experiment(cfg, exp);

    std::ostringstream csv;
    csv << "fraction,repeat,metric,value\n";
    for (const auto& row : rows)
        csv << format_double(row.fraction) << ',' << row.repeat << ',' << row.metric << ','
            << format_double(row.value) << '\n';
    write_text_file(cfg.out_dir / "permutation" / "results.csv", csv.str());
}

}  // namespace faithbench
