// Copyright 2026 The davies-gap Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: davies-gap <task> [--config FILE] [options] [--set key=value ...]
//
// Options are applied after the config file; --set assignments last.
// Exit status: 0 ok, 1 internal error, 2 usage, 3 check or bound failure,
// 4 non-convergence.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "davies/run.hpp"

namespace {

struct Flag {
    const char* name;
    const char* key;
    const char* help;
};

const Flag kFlags[] = {
    {"--model", "model", "ising or toric"},
    {"--size", "size", "N (ring) or L (torus); list or range a..b"},
    {"--J", "J", "coupling constant"},
    {"--betaJ", "betaJ", "comma-separated inverse temperatures in units of 1/J"},
    {"--couplings", "couplings", "coupling letters (e.g. xz) or 'default'"},
    {"--observable", "observable", "Z1, X1, Z2, X2 or Pauli text"},
    {"--path", "path", "auto, full or blocks"},
    {"--dense-cap", "dense_cap", "largest dimension solved densely"},
    {"--max-iter", "max_iter", "iterative solver matrix-vector cap"},
    {"--tol", "tol", "iterative residual tolerance"},
    {"--points", "points", "time-grid points for dynamics"},
    {"--samples", "samples", "random blocks checked by verify"},
    {"--timing", "timing", "record wall-clock seconds (true/false)"},
    {"--workers", "workers", "worker threads (default DAVIES_WORKERS or all cores)"},
    {"--matrix", "matrix", "export-model matrix: none, H, K or L"},
    {"--matrix-out", "matrix_out", "export-model coordinate-format output"},
    {"--rate-table", "rate_table", "JSON list of {coupling, omega, rate}"},
    {"--out", "out", "primary output file (default stdout)"},
    {"--json", "json", "JSON summary file"},
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw davies::ConfigError("cannot write '" + path + "'");
    os << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral-gap certification for Davies generators of the Ising ring and the toric code"};
    app.require_subcommand(1);
    std::string config_file;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    std::vector<std::string> values(std::size(kFlags));
    for (const auto& task : davies::known_tasks()) {
        CLI::App* sub = app.add_subcommand(task);
        sub->add_option("--config", config_file, "key = value run configuration");
        sub->add_option("--seed", seed, "seed for randomized checks");
        for (std::size_t i = 0; i < std::size(kFlags); ++i) sub->add_option(kFlags[i].name, values[i], kFlags[i].help);
        sub->add_option("--set", sets, "key=value override (repeatable)");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return davies::kExitUsage;
    }

    try {
        davies::RunConfig cfg = config_file.empty() ? davies::RunConfig{} : davies::load_config(config_file);
        cfg.task = app.get_subcommands().front()->get_name();
        for (std::size_t i = 0; i < std::size(kFlags); ++i)
            if (!values[i].empty()) davies::apply_setting(cfg, kFlags[i].key, values[i]);
        for (const auto* sub : app.get_subcommands())
            if (sub->count("--seed")) davies::apply_setting(cfg, "seed", std::to_string(seed));
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw davies::ConfigError("--set expects key=value, got '" + s + "'");
            davies::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
        }
        const davies::RunResult res = davies::run(cfg);
        if (cfg.out.empty()) std::cout << res.primary;
        else write_text(cfg.out, res.primary);
        if (!cfg.json.empty()) write_text(cfg.json, res.summary.dump(2) + "\n");
        if (!res.matrix_coo.empty()) write_text(cfg.matrix_out, res.matrix_coo);
        if (res.status != davies::kExitOk) std::cerr << "davies-gap: checks failed (status " << res.status << ")\n";
        return res.status;
    } catch (const davies::ConfigError& e) {
        std::cerr << "davies-gap: " << e.what() << '\n';
        return davies::kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "davies-gap: " << e.what() << '\n';
        return davies::kExitUsage;
    } catch (const davies::ConvergenceError& e) {
        std::cerr << "davies-gap: " << e.what() << '\n';
        return davies::kExitNoConvergence;
    } catch (const davies::DynamicsError& e) {
        std::cerr << "davies-gap: " << e.what() << '\n';
        return davies::kExitNoConvergence;
    } catch (const std::exception& e) {
        std::cerr << "davies-gap: internal error: " << e.what() << '\n';
        return davies::kExitInternal;
    }
}
