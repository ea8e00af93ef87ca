#include "faithbench.h"

#include <cstring>
#include <string>

#include "faithbench/harness.hpp"
#include "faithbench/version.hpp"

using namespace faithbench;

// Opaque handle definitions: each wraps one immutable core object.
struct fb_dataset {
    Dataset ds;
};
struct fb_model {
    DenseModel model;
};
struct fb_table {
    AttributionTable table;
};

namespace {

thread_local std::string g_last_error;

fb_status status_from(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return FB_E_INVALID_ARGUMENT;
        case ErrorCode::io: return FB_E_IO;
        case ErrorCode::parse: return FB_E_PARSE;
        case ErrorCode::schema:
        case ErrorCode::shape: return FB_E_SCHEMA;
        case ErrorCode::numeric: return FB_E_NUMERIC;
        case ErrorCode::unavailable: return FB_E_UNAVAILABLE;
        case ErrorCode::internal: return FB_E_INTERNAL;
    }
    return FB_E_INTERNAL;
}

template <class Fn>
fb_status guarded(Fn&& fn) {
    try {
        g_last_error.clear();
        return fn();
    } catch (const Error& err) {
        g_last_error = err.what();
        return status_from(err.code());
    } catch (const std::exception& ex) {
        g_last_error = ex.what();
        return FB_E_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return FB_E_INTERNAL;
    }
}

fb_status fail(fb_status status, const char* message) {
    g_last_error = message;
    return status;
}

nlohmann::json parse_json_arg(const char* text, const char* what) {
    require(text != nullptr, ErrorCode::invalid_argument, std::string(what) + " is NULL");
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    require(!j.is_discarded(), ErrorCode::invalid_argument,
            std::string(what) + " is not valid JSON");
    return j;
}

ExperimentConfig config_from_arg(const char* config_json) {
    return ExperimentConfig::from_json(parse_json_arg(config_json, "config_json"));
}

fb_status run_command(const char* config_json, void (*command)(const ExperimentConfig&)) {
    return guarded([&]() -> fb_status {
        command(config_from_arg(config_json));
        return FB_OK;
    });
}

}  // namespace

extern "C" {

const char* fb_version(void) { return kVersion; }

const char* fb_last_error(void) { return g_last_error.c_str(); }

/* ---- datasets ---------------------------------------------------------- */

fb_status fb_dataset_synth(const char* spec_json, fb_dataset** out) {
    if (!out) return fail(FB_E_INVALID_ARGUMENT, "out is NULL");
    *out = nullptr;
    return guarded([&]() -> fb_status {
        const nlohmann::json j =
            spec_json ? parse_json_arg(spec_json, "spec_json") : nlohmann::json::object();
        *out = new fb_dataset{generate_synthetic(SyntheticSpec::from_json(j))};
        return FB_OK;
    });
}

fb_status fb_dataset_load(const char* csv_path, const char* schema_path, fb_dataset** out) {
    if (!out) return fail(FB_E_INVALID_ARGUMENT, "out is NULL");
    *out = nullptr;
    if (!csv_path || !schema_path) return fail(FB_E_INVALID_ARGUMENT, "path argument is NULL");
    return guarded([&]() -> fb_status {
        *out = new fb_dataset{load_dataset(csv_path, schema_path)};
        return FB_OK;
    });
}

fb_status fb_dataset_save(const fb_dataset* ds, const char* csv_path, const char* schema_path) {
    if (!ds || !csv_path || !schema_path) return fail(FB_E_INVALID_ARGUMENT, "argument is NULL");
    return guarded([&]() -> fb_status {
        save_dataset(ds->ds, csv_path, schema_path);
        return FB_OK;
    });
}

fb_status fb_dataset_standardize(const fb_dataset* ds, fb_dataset** out) {
    if (!out) return fail(FB_E_INVALID_ARGUMENT, "out is NULL");
    *out = nullptr;
    if (!ds) return fail(FB_E_INVALID_ARGUMENT, "ds is NULL");
    return guarded([&]() -> fb_status {
        *out = new fb_dataset{standardize(ds->ds)};
        return FB_OK;
    });
}

fb_status fb_dataset_inject_random(const fb_dataset* ds, int count, long long seed,
                                   fb_dataset** out) {
    if (!out) return fail(FB_E_INVALID_ARGUMENT, "out is NULL");
    *out = nullptr;
    if (!ds) return fail(FB_E_INVALID_ARGUMENT, "ds is NULL");
    return guarded([&]() -> fb_status {
        *out = new fb_dataset{
            inject_random_features(ds->ds, count, static_cast<uint64_t>(seed))};
        return FB_OK;
    });
}

size_t fb_dataset_rows(const fb_dataset* ds) { return ds ? ds->ds.rows() : 0; }

size_t fb_dataset_cols(const fb_dataset* ds) { return ds ? ds->ds.cols() : 0; }

fb_status fb_dataset_hash(const fb_dataset* ds, char* buf, size_t buflen) {
    if (!ds || !buf) return fail(FB_E_INVALID_ARGUMENT, "argument is NULL");
    return guarded([&]() -> fb_status {
        const std::string hash = ds->ds.hash();
        require(buflen > hash.size(), ErrorCode::invalid_argument,
                "buffer too small for the dataset hash");
        std::memcpy(buf, hash.c_str(), hash.size() + 1);
        return FB_OK;
    });
}

void fb_dataset_free(fb_dataset* ds) { delete ds; }

/* ---- models ------------------------------------------------------------ */

fb_status fb_model_train(const fb_dataset* ds, const char* train_json, fb_model** out) {
    if (!out) return fail(FB_E_INVALID_ARGUMENT, "out is NULL");
    *out = nullptr;
    if (!ds) return fail(FB_E_INVALID_ARGUMENT, "ds is NULL");
    return guarded([&]() -> fb_status {
        const nlohmann::json j =
            train_json ? parse_json_arg(train_json, "train_json") : nlohmann::json::object();
        TrainConfig cfg;
        cfg.epochs = j.value("epochs", cfg.epochs);
        cfg.batch_size = j.value("batch_size", cfg.batch_size);
        cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("hidden_widths")) {
            const auto widths = j["hidden_widths"].get<std::vector<int>>();
            require(widths.size() == 2, ErrorCode::invalid_argument,
                    "hidden_widths must have exactly two entries");
            cfg.hidden_widths = {widths[0], widths[1]};
        }
        const ArchTag tag = arch_tag_from_name(j.value("architecture", std::string("linear")));
        *out = new fb_model{train(ds->ds, cfg, tag)};
        return FB_OK;
    });
}

fb_status fb_model_load(const char* path, fb_model** out) {
    if (!out) return fail(FB_E_INVALID_ARGUMENT, "out is NULL");
    *out = nullptr;
    if (!path) return fail(FB_E_INVALID_ARGUMENT, "path is NULL");
    return guarded([&]() -> fb_status {
        *out = new fb_model{load_model(path)};
        return FB_OK;
    });
}

fb_status fb_model_save(const fb_model* model, const char* path) {
    if (!model || !path) return fail(FB_E_INVALID_ARGUMENT, "argument is NULL");
    return guarded([&]() -> fb_status {
        save_model(model->model, path);
        return FB_OK;
    });
}

fb_status fb_model_predict(const fb_model* model, const double* x, size_t d, double* out) {
    if (!model || !x || !out) return fail(FB_E_INVALID_ARGUMENT, "argument is NULL");
    return guarded([&]() -> fb_status {
        *out = model->model.predict(Eigen::Map<const Eigen::VectorXd>(x, static_cast<Eigen::Index>(d)));
        return FB_OK;
    });
}

fb_status fb_model_logit(const fb_model* model, const double* x, size_t d, double* out) {
    if (!model || !x || !out) return fail(FB_E_INVALID_ARGUMENT, "argument is NULL");
    return guarded([&]() -> fb_status {
        *out = model->model.logit(Eigen::Map<const Eigen::VectorXd>(x, static_cast<Eigen::Index>(d)));
        return FB_OK;
    });
}

fb_status fb_model_input_gradient(const fb_model* model, const double* x, size_t d, int target,
                                  double* grad_out) {
    if (!model || !x || !grad_out) return fail(FB_E_INVALID_ARGUMENT, "argument is NULL");
    if (target != 0 && target != 1)
        return fail(FB_E_INVALID_ARGUMENT, "target must be 0 (probability) or 1 (logit)");
    return guarded([&]() -> fb_status {
        const Eigen::VectorXd grad = model->model.input_gradient(
            Eigen::Map<const Eigen::VectorXd>(x, static_cast<Eigen::Index>(d)),
            target == 1 ? GradientTarget::logit : GradientTarget::probability);
        std::memcpy(grad_out, grad.data(), sizeof(double) * static_cast<size_t>(grad.size()));
        return FB_OK;
    });
}

void fb_model_free(fb_model* model) { delete model; }

/* ---- attribution tables ------------------------------------------------ */

fb_status fb_table_generate(const fb_dataset* ds, const fb_model* model, const char* request_json,
                            fb_table** out) {
    if (!out) return fail(FB_E_INVALID_ARGUMENT, "out is NULL");
    *out = nullptr;
    if (!ds || !model) return fail(FB_E_INVALID_ARGUMENT, "argument is NULL");
    return guarded([&]() -> fb_status {
        const nlohmann::json j = parse_json_arg(request_json, "request_json");
        require(j.contains("method"), ErrorCode::invalid_argument, "request needs a 'method'");
        const MethodId method = MethodId::parse(j["method"].get<std::string>());
        require(method.kind != MethodId::Kind::imported, ErrorCode::invalid_argument,
                "use fb_table_import for externally produced tables");

        GridSpec spec;
        spec.baseline_k = j.value("k", spec.baseline_k);
        spec.ig.steps = j.value("ig_steps", spec.ig.steps);
        spec.kernel_shap.n_coalitions = j.value("n_coalitions", spec.kernel_shap.n_coalitions);
        spec.master_seed = j.value("seed", uint64_t{0});

        std::optional<BaselineKind> baseline;
        if (j.contains("baseline")) baseline = baseline_kind_from_name(j["baseline"].get<std::string>());
        const int repeat = j.value("repeat", 0);

        *out = new fb_table{generate_table(ds->ds, model->model, spec, method, baseline, repeat)};
        return FB_OK;
    });
}

fb_status fb_table_import(const fb_dataset* ds, const char* csv_path, const char* sidecar_path,
                          fb_table** out) {
    if (!out) return fail(FB_E_INVALID_ARGUMENT, "out is NULL");
    *out = nullptr;
    if (!ds || !csv_path || !sidecar_path) return fail(FB_E_INVALID_ARGUMENT, "argument is NULL");
    return guarded([&]() -> fb_status {
        *out = new fb_table{import_table(csv_path, sidecar_path, ds->ds)};
        return FB_OK;
    });
}

fb_status fb_table_save(const fb_table* table, const fb_dataset* ds, const char* csv_path,
                        const char* sidecar_path) {
    if (!table || !ds || !csv_path || !sidecar_path)
        return fail(FB_E_INVALID_ARGUMENT, "argument is NULL");
    return guarded([&]() -> fb_status {
        save_table(table->table, ds->ds.schema, csv_path, sidecar_path);
        return FB_OK;
    });
}

size_t fb_table_rows(const fb_table* table) {
    return table ? static_cast<size_t>(table->table.values.rows()) : 0;
}

size_t fb_table_cols(const fb_table* table) {
    return table ? static_cast<size_t>(table->table.values.cols()) : 0;
}

fb_status fb_table_value(const fb_table* table, size_t row, size_t col, double* out) {
    if (!table || !out) return fail(FB_E_INVALID_ARGUMENT, "argument is NULL");
    return guarded([&]() -> fb_status {
        require(row < static_cast<size_t>(table->table.values.rows()) &&
                    col < static_cast<size_t>(table->table.values.cols()),
                ErrorCode::invalid_argument, "table index out of range");
        *out = table->table.values(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
        return FB_OK;
    });
}

void fb_table_free(fb_table* table) { delete table; }

/* ---- metrics ----------------------------------------------------------- */

namespace {

void parse_metric_cfg(const char* cfg_json, PerturbSpec& spec, PgiConfig& pgi_cfg,
                      AblationConfig& abl_cfg) {
    const nlohmann::json j =
        cfg_json ? parse_json_arg(cfg_json, "cfg_json") : nlohmann::json::object();
    const std::string mode = j.value("numeric_mode", std::string("gaussian"));
    require(mode == "gaussian" || mode == "marginal", ErrorCode::invalid_argument,
            "numeric_mode must be 'gaussian' or 'marginal'");
    spec.numeric_mode = mode == "gaussian" ? NumericMode::gaussian : NumericMode::marginal;
    spec.sigma = j.value("sigma", spec.sigma);
    spec.flip_prob = j.value("flip_prob", spec.flip_prob);
    spec.seed = j.value("seed", spec.seed);
    pgi_cfg.k = j.value("k", pgi_cfg.k);
    pgi_cfg.m = j.value("m", pgi_cfg.m);
    pgi_cfg.aggregate_categorical = j.value("aggregate_categorical", false);
    pgi_cfg.seed = spec.seed;
    abl_cfg.aggregate_categorical = j.value("aggregate_categorical", true);
    abl_cfg.per_row = j.value("per_row", abl_cfg.per_row);
    abl_cfg.cumulative = j.value("cumulative", abl_cfg.cumulative);
    abl_cfg.seed = spec.seed;
}

}  // namespace

fb_status fb_metric_pgi(const fb_model* model, const fb_dataset* ds, const fb_table* table,
                        const char* cfg_json, double* out) {
    if (!model || !ds || !table || !out) return fail(FB_E_INVALID_ARGUMENT, "argument is NULL");
    return guarded([&]() -> fb_status {
        PerturbSpec spec;
        PgiConfig pgi_cfg;
        AblationConfig abl_cfg;
        parse_metric_cfg(cfg_json, spec, pgi_cfg, abl_cfg);
        *out = pgi(model->model, ds->ds, table->table, spec, pgi_cfg).value;
        return FB_OK;
    });
}

fb_status fb_metric_abc(const fb_model* model, const fb_dataset* ds, const fb_table* table,
                        const char* cfg_json, double* out) {
    if (!model || !ds || !table || !out) return fail(FB_E_INVALID_ARGUMENT, "argument is NULL");
    return guarded([&]() -> fb_status {
        PerturbSpec spec;
        PgiConfig pgi_cfg;
        AblationConfig abl_cfg;
        parse_metric_cfg(cfg_json, spec, pgi_cfg, abl_cfg);
        *out = ablation_curve(model->model, ds->ds, table->table, spec, abl_cfg).auc;
        return FB_OK;
    });
}

/* ---- pipeline commands -------------------------------------------------- */

fb_status fb_cmd_synth(const char* config_json) { return run_command(config_json, cmd_synth); }
fb_status fb_cmd_train(const char* config_json) { return run_command(config_json, cmd_train); }
fb_status fb_cmd_explain(const char* config_json) { return run_command(config_json, cmd_explain); }
fb_status fb_cmd_score(const char* config_json) { return run_command(config_json, cmd_score); }
fb_status fb_cmd_tda(const char* config_json) { return run_command(config_json, cmd_tda); }
fb_status fb_cmd_rank(const char* config_json) { return run_command(config_json, cmd_rank); }
fb_status fb_cmd_permute_exp(const char* config_json) {
    return run_command(config_json, cmd_permute_exp);
}
fb_status fb_cmd_report(const char* config_json) { return run_command(config_json, cmd_report); }

fb_status fb_cmd_grid(const char* config_json) {
    return guarded([&]() -> fb_status {
        const GridResult result = cmd_grid(config_from_arg(config_json));
        if (result.any_failed()) {
            std::string message = "grid finished with failed cells:";
            for (const auto& cell : result.cells)
                if (cell.status == CellStatus::failed)
                    message += " " + cell.id + " (" + cell.message + ")";
            g_last_error = message;
            return FB_E_PARTIAL;
        }
        return FB_OK;
    });
}

}  // extern "C"
