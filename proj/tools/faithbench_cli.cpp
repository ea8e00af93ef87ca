// faithbench command line: thin wrapper over the shared-library C API.
// Subcommands mirror the pipeline stages; each takes a JSON config file plus
// a few flag overrides merged on top.
//
// Exit codes: 0 success, 1 runtime/partial failure, 2 usage or config error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "faithbench.h"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    std::string seed;
    std::string workers;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "JSON experiment config")->required();
    cmd->add_option("--out", opts.out_dir, "override the output directory");
    cmd->add_option("--seed", opts.seed, "override the master seed");
    cmd->add_option("--workers", opts.workers, "override the worker count");
}

// Reads the config file and applies flag overrides; returns the effective
// config as a JSON string. Throws std::runtime_error with a message meant for
// exit code 2.
std::string effective_config(const CommonOptions& opts) {
    std::ifstream in(opts.config_path);
    if (!in.good()) throw std::runtime_error("cannot open config file: " + opts.config_path);
    std::ostringstream ss;
    ss << in.rdbuf();
    nlohmann::json config = nlohmann::json::parse(ss.str(), nullptr, false);
    if (config.is_discarded())
        throw std::runtime_error("config file is not valid JSON: " + opts.config_path);
    if (!opts.out_dir.empty()) config["out_dir"] = opts.out_dir;
    if (!opts.seed.empty()) config["seed"] = std::stoull(opts.seed);
    if (!opts.workers.empty()) config["workers"] = std::stoi(opts.workers);
    return config.dump();
}

int exit_code_for(fb_status status) {
    switch (status) {
        case FB_OK: return 0;
        case FB_E_INVALID_ARGUMENT: return 2;
        default: return 1;
    }
}

int run(fb_status (*command)(const char*), const CommonOptions& opts, const char* name) {
    std::string config;
    try {
        config = effective_config(opts);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    const fb_status status = command(config.c_str());
    if (status != FB_OK) {
        std::cerr << name << " failed: " << fb_last_error() << "\n";
        return exit_code_for(status);
    }
    std::cout << name << ": done\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"faithbench: faithfulness-metric benchmarking for tabular attribution methods"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(fb_version()));

    struct Sub {
        const char* name;
        const char* help;
        fb_status (*command)(const char*);
    };
    const Sub subs[] = {
        {"synth", "generate and standardize the synthetic dataset", fb_cmd_synth},
        {"train", "train the configured model architectures", fb_cmd_train},
        {"explain", "generate the attribution table grid", fb_cmd_explain},
        {"score", "compute PGI and ablation scores for all tables", fb_cmd_score},
        {"tda", "mapper/persistence pipeline and BND scores", fb_cmd_tda},
        {"rank", "rankings, agreement matrices and report artifacts", fb_cmd_rank},
        {"permute-exp", "ground-truth row-permutation experiment", fb_cmd_permute_exp},
        {"grid", "full pipeline end to end", fb_cmd_grid},
        {"report", "re-emit report artifacts from existing scores", fb_cmd_report},
    };

    CommonOptions opts[std::size(subs)];
    for (size_t i = 0; i < std::size(subs); ++i) {
        CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].help);
        add_common(cmd, opts[i]);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    for (size_t i = 0; i < std::size(subs); ++i) {
        if (app.get_subcommand(subs[i].name)->parsed())
            return run(subs[i].command, opts[i], subs[i].name);
    }
    std::cerr << "error: no subcommand selected\n";
    return 2;
}
