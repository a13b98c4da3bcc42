// Copyright 2026 The davies-gap Authors
// SPDX-License-Identifier: Apache-2.0

/**
 * @file run.hpp
 * @brief Run configurations and the task pipelines behind the command-line tool.
 *
 * Config grammar: one `key = value` per line; `#` starts a comment; blank
 * lines are ignored; later assignments override earlier ones. Lists use
 * commas (`betaJ = 0, 0.25`); integer ranges use `a..b` (`size = 3..6`).
 *
 * Keys: task, model, size, J, betaJ, couplings, observable, path, dense_cap,
 * max_iter, tol, kernel_rel, krylov, keep, seed, samples, timing, points,
 * workers, matrix, matrix_out, out, json, rate_table.
 */

#pragma once

#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "davies/commutant.hpp"
#include "davies/dynamics.hpp"

namespace davies {

/// Exit statuses of the command-line tool.
enum ExitStatus : int {
    kExitOk = 0,
    kExitInternal = 1,      ///< unexpected runtime error
    kExitUsage = 2,         ///< invalid arguments or configuration, feasibility refusal
    kExitCheckFailed = 3,   ///< invariant or bound violation
    kExitNoConvergence = 4, ///< eigen- or exponential solver did not converge
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string task = "gap";
    ModelKind model = ModelKind::Ising;
    std::vector<int> sizes{3};
    double J = 1.0;
    std::vector<double> beta_j{0.0};
    std::string couplings = "default";
    std::string observable = "Z1";
    CertifyPath path = CertifyPath::Auto;
    SolverOptions solver;
    std::uint64_t seed = 1;
    int samples = 4;
    bool timing = true;
    int points = 60;
    int workers = 0;
    std::string matrix = "none"; ///< export-model: none, H, K or L
    std::string out;
    std::string json;
    std::string rate_table;
    std::string matrix_out; ///< export-model: coordinate-format destination
};

inline const std::vector<std::string>& known_tasks() {
    static const std::vector<std::string> t{"verify", "gap", "bounds", "dynamics", "sweep", "export-model"};
    return t;
}

namespace detail {

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double d = 0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size()) throw ConfigError(key + ": not a number: '" + v + "'");
    return d;
}

inline long long to_int(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long long d = 0;
    try {
        d = std::stoll(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size()) throw ConfigError(key + ": not an integer: '" + v + "'");
    return d;
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key + ": not a boolean: '" + v + "'");
}

} // namespace detail

/// Applies one key/value assignment.
inline void apply_setting(RunConfig& c, const std::string& key_in, const std::string& value_in) {
    const std::string key = detail::trim(key_in), v = detail::trim(value_in);
    if (v.empty()) throw ConfigError(key + ": empty value");
    if (key == "task") {
        if (std::find(known_tasks().begin(), known_tasks().end(), v) == known_tasks().end())
            throw ConfigError("unknown task '" + v + "'");
        c.task = v;
    } else if (key == "model") {
        if (v == "ising") c.model = ModelKind::Ising;
        else if (v == "toric") c.model = ModelKind::Toric;
        else throw ConfigError("model must be ising or toric");
    } else if (key == "size" || key == "N" || key == "L") {
        c.sizes.clear();
        for (const auto& item : detail::split_list(v)) {
            const auto dots = item.find("..");
            if (dots == std::string::npos) {
                c.sizes.push_back(static_cast<int>(detail::to_int(key, item)));
                continue;
            }
            const auto a = detail::to_int(key, item.substr(0, dots)), b = detail::to_int(key, item.substr(dots + 2));
            if (b < a || b - a > 64) throw ConfigError(key + ": bad range '" + item + "'");
            for (auto s = a; s <= b; ++s) c.sizes.push_back(static_cast<int>(s));
        }
    } else if (key == "J") {
        c.J = detail::to_double(key, v);
    } else if (key == "betaJ" || key == "beta_j") {
        c.beta_j.clear();
        for (const auto& item : detail::split_list(v)) c.beta_j.push_back(detail::to_double(key, item));
    } else if (key == "couplings") {
        c.couplings = v;
    } else if (key == "observable") {
        c.observable = v;
    } else if (key == "path") {
        if (v == "auto") c.path = CertifyPath::Auto;
        else if (v == "full") c.path = CertifyPath::Full;
        else if (v == "blocks") c.path = CertifyPath::Blocks;
        else throw ConfigError("path must be auto, full or blocks");
    } else if (key == "dense_cap") {
        c.solver.dense_cap = detail::to_int(key, v);
    } else if (key == "max_iter") {
        c.solver.max_iter = static_cast<int>(detail::to_int(key, v));
    } else if (key == "tol") {
        c.solver.tol = detail::to_double(key, v);
    } else if (key == "kernel_rel") {
        c.solver.kernel_rel = detail::to_double(key, v);
    } else if (key == "krylov") {
        c.solver.krylov = static_cast<int>(detail::to_int(key, v));
    } else if (key == "keep") {
        c.solver.keep = static_cast<int>(detail::to_int(key, v));
    } else if (key == "seed") {
        c.seed = static_cast<std::uint64_t>(detail::to_int(key, v));
        c.solver.seed = c.seed;
    } else if (key == "samples") {
        c.samples = static_cast<int>(detail::to_int(key, v));
    } else if (key == "timing") {
        c.timing = detail::to_bool(key, v);
    } else if (key == "points") {
        c.points = static_cast<int>(detail::to_int(key, v));
    } else if (key == "workers") {
        c.workers = static_cast<int>(detail::to_int(key, v));
    } else if (key == "matrix") {
        if (v != "none" && v != "H" && v != "K" && v != "L") throw ConfigError("matrix must be none, H, K or L");
        c.matrix = v;
    } else if (key == "out") {
        c.out = v;
    } else if (key == "json") {
        c.json = v;
    } else if (key == "rate_table") {
        c.rate_table = v;
    } else if (key == "matrix_out") {
        c.matrix_out = v;
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
}

/// Parses `key = value` text; `origin` names the source in error messages.
inline void parse_config(std::istream& is, RunConfig& c, const std::string& origin = "config") {
    std::string line;
    int no = 0;
    while (std::getline(is, line)) {
        ++no;
        if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(origin + ":" + std::to_string(no) + ": expected key = value");
        try {
            apply_setting(c, line.substr(0, eq), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(origin + ":" + std::to_string(no) + ": " + e.what());
        }
    }
}

inline RunConfig load_config(const std::string& file) {
    std::ifstream is(file);
    if (!is) throw ConfigError("cannot open config file '" + file + "'");
    RunConfig c;
    parse_config(is, c, file);
    return c;
}

inline ModelSpec build_model(const RunConfig& c, int size) {
    return c.model == ModelKind::Ising ? build_ising_ring(size, c.J) : build_toric_code(size, c.J);
}

inline int model_sites(ModelKind k, int size) { return k == ModelKind::Ising ? size : 2 * size * size; }

/// Number of independent stabilizers, which fixes the block dimension 2^rank.
inline int model_rank(ModelKind k, int size) { return k == ModelKind::Ising ? size - 1 : 2 * size * size - 2; }

/// Checks tolerances and the feasibility table: full-space tasks need at most
/// 8 sites, block tasks at most 2^20 per block.
inline void validate(const RunConfig& c) {
    if (c.sizes.empty()) throw ConfigError("size list is empty");
    if (c.beta_j.empty()) throw ConfigError("betaJ list is empty");
    if (!(c.J > 0)) throw ConfigError("J must be positive");
    for (double b : c.beta_j)
        if (!(b >= 0)) throw ConfigError("betaJ must be nonnegative");
    if (!(c.solver.tol > 0) || !(c.solver.kernel_rel > 0)) throw ConfigError("tolerances must be positive");
    if (c.solver.dense_cap < 1 || c.solver.krylov < 4 || c.solver.keep < 1 || c.solver.keep >= c.solver.krylov)
        throw ConfigError("solver sizes out of range (dense_cap >= 1, 4 <= krylov, 1 <= keep < krylov)");
    if (c.samples < 1 || c.points < 4) throw ConfigError("samples >= 1 and points >= 4 required");
    if (c.workers < 0) throw ConfigError("workers must be nonnegative");
    const bool needs_generator = c.task != "bounds" && !(c.task == "export-model" && c.matrix != "K" && c.matrix != "L");
    for (int s : c.sizes) {
        if (c.model == ModelKind::Ising && (s < 3 || s > 21)) throw ConfigError("Ising ring needs 3 <= N <= 21");
        if (c.model == ModelKind::Toric && (s < 2 || s > 3)) throw ConfigError("toric code needs L = 2 or 3");
        if (!needs_generator) continue;
        const int n = model_sites(c.model, s);
        const bool full = c.path == CertifyPath::Full || (c.task == "export-model") ||
                          (c.path == CertifyPath::Auto && n <= 4);
        if (full && n > 8) throw ConfigError("full operator space limited to 8 sites (got " + std::to_string(n) + ")");
        if (model_rank(c.model, s) > 20) throw ConfigError("block dimension exceeds 2^20");
    }
    if (c.task == "export-model" && c.matrix != "none" && c.matrix_out.empty())
        throw ConfigError("matrix export needs matrix_out");
    if (c.task == "export-model" && c.matrix == "H")
        for (int s : c.sizes)
            if (model_sites(c.model, s) > 16) throw ConfigError("Hamiltonian export limited to 16 sites");
}

inline std::vector<RateEntry> load_rate_table(const std::string& file) {
    std::ifstream is(file);
    if (!is) throw ConfigError("cannot open rate table '" + file + "'");
    std::vector<RateEntry> out;
    try {
        for (const auto& e : nlohmann::json::parse(is))
            out.push_back({e.at("coupling").get<std::string>(), e.at("omega").get<double>(), e.at("rate").get<double>()});
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("rate table '" + file + "': " + e.what());
    }
    return out;
}

inline ThermalParams thermal(const RunConfig& c, double bj) {
    ThermalParams tp = ThermalParams::from_beta_j(bj, c.J);
    if (!c.rate_table.empty()) tp.rate_table = load_rate_table(c.rate_table);
    return tp;
}

/// Observable by name: Z1, X1, Z2, X2 (logical operators) or explicit Pauli text.
inline PauliString resolve_observable(const ModelSpec& m, const std::string& name) {
    if (name.size() == 2 && (name[0] == 'Z' || name[0] == 'X') && std::isdigit(static_cast<unsigned char>(name[1]))) {
        const int k = name[1] - '1';
        if (k < 0 || k >= static_cast<int>(m.logicals.size())) throw ConfigError("no logical qubit " + name.substr(1));
        return name[0] == 'Z' ? m.logicals[static_cast<std::size_t>(k)].Z : m.logicals[static_cast<std::size_t>(k)].X;
    }
    PauliString p;
    try {
        p = PauliString::parse(name);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("observable: ") + e.what());
    }
    if (p.n != m.n_sites) throw ConfigError("observable has " + std::to_string(p.n) + " sites, model has " +
                                            std::to_string(m.n_sites));
    return p;
}

inline std::vector<PauliString> resolve_couplings(const RunConfig& c, const ModelSpec& m) {
    try {
        return couplings_from_letters(m, c.couplings);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("couplings: ") + e.what());
    }
}

struct RunResult {
    int status = kExitOk;
    std::string primary; ///< CSV, text table or JSON written to `out` or stdout
    nlohmann::json summary;
    std::string matrix_coo; ///< export-model matrix, written to `matrix_out`
};

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

inline void raise(int& status, int s) {
    // Non-convergence dominates a check failure; both dominate success.
    if (s == kExitNoConvergence || status == kExitOk) status = s;
}

inline CertifyOptions certify_options(const RunConfig& c) {
    CertifyOptions o;
    o.path = c.path;
    o.solver = c.solver;
    o.workers = c.workers;
    return o;
}

inline nlohmann::json gap_json(const GapReport& r, bool timing) {
    nlohmann::json j = to_json(r);
    if (!timing) j.erase("elapsed");
    return j;
}

inline RunResult run_verify(const RunConfig& c) {
    RunResult res;
    auto& items = res.summary["models"] = nlohmann::json::array();
    for (int size : c.sizes) {
        const ModelSpec m = build_model(c, size);
        const ModelReport mr = verify_model(m);
        nlohmann::json j{{"model", m.label()},
                         {"ok", mr.ok},
                         {"failures", mr.failures},
                         {"independent_stabilizers", mr.independent_stabilizers},
                         {"ground_degeneracy", mr.ground_degeneracy}};
        if (mr.snake_flip_rank >= 0) j["snake_flip_rank"] = mr.snake_flip_rank;
        if (mr.comb_flip_rank >= 0) j["comb_flip_rank"] = mr.comb_flip_rank;
        if (!mr.ok) raise(res.status, kExitCheckFailed);
        const auto cs = resolve_couplings(c, m);
        j["commutant_dimension"] = commutant_dimension(cs, m.hamiltonian());
        const SyndromeFrame fr(m);
        auto& checks = j["generator_checks"] = nlohmann::json::array();
        if (fr.block_dim() > 4096) {
            j["generator_checks_skipped"] = "block dimension " + std::to_string(fr.block_dim()) + " above 4096";
            items.push_back(j);
            continue;
        }
        for (double bj : c.beta_j) {
            const ThermalParams tp = thermal(c, bj);
            const DaviesGenerator g(m, cs, tp);
            const GibbsState gs = gibbs_state(m, tp.beta);
            // The identity class plus a few seeded random classes.
            std::mt19937_64 rng(c.seed);
            std::vector<std::uint64_t> syns{0};
            for (int s = 1; s < c.samples && fr.block_count() > 1; ++s) syns.push_back(1 + rng() % (fr.block_count() - 1));
            double db = 0, st = 0, dis = 0;
            for (auto syn : syns) {
                const auto basis = fr.class_basis(syn);
                const auto rep = build_generator(g, basis);
                db = std::max(db, detailed_balance_residual(rep, gs, 2, c.seed + syn));
                for (std::size_t ch = 0; ch < g.channels().size(); ++ch)
                    dis = std::max(dis, dissipativity_identity_check(g, ch, gs, basis, 1, c.seed + syn));
                if (syn == 0) st = stationarity_residual(rep, gs, 2, c.seed);
            }
            const bool ok = db < 1e-12 && st < 1e-12 && dis < 1e-12;
            if (!ok) raise(res.status, kExitCheckFailed);
            checks.push_back({{"betaJ", bj},
                              {"blocks_checked", syns.size()},
                              {"detailed_balance_residual", db},
                              {"stationarity_residual", st},
                              {"dissipativity_residual", dis},
                              {"ok", ok}});
        }
        items.push_back(j);
    }
    res.summary["status"] = res.status;
    res.primary = res.summary.dump(2) + "\n";
    return res;
}

inline RunResult run_bounds(const RunConfig& c) {
    RunResult res;
    std::ostringstream os;
    auto& rows = res.summary["bounds"] = nlohmann::json::array();
    for (int size : c.sizes) {
        const ModelSpec m = build_model(c, size);
        for (double bj : c.beta_j) {
            for (const auto& b : analytic_bounds(m, thermal(c, bj))) {
                os << m.label() << " betaJ=" << bj << ' ' << b.name << ' ' << std::setprecision(12) << b.value << '\n';
                rows.push_back({{"model", m.label()}, {"betaJ", bj}, {"name", b.name}, {"value", b.value}});
            }
        }
    }
    res.primary = os.str();
    return res;
}

inline RunResult run_gap(const RunConfig& c) {
    RunResult res;
    auto& rows = res.summary["results"] = nlohmann::json::array();
    for (int size : c.sizes) {
        const ModelSpec m = build_model(c, size);
        const auto cs = resolve_couplings(c, m);
        const auto expected = static_cast<std::int64_t>(commutant_dimension(cs, m.hamiltonian()));
        for (double bj : c.beta_j) {
            const DaviesGenerator g(m, cs, thermal(c, bj));
            const GapReport r = certify(g, certify_options(c));
            nlohmann::json j = gap_json(r, c.timing);
            j["model"] = m.label();
            j["betaJ"] = bj;
            j["commutant_dimension"] = expected;
            const bool kernel_ok = r.kernel_dim == expected;
            j["kernel_matches_commutant"] = kernel_ok;
            if (!r.converged) raise(res.status, kExitNoConvergence);
            if (!r.certified() || !kernel_ok) raise(res.status, kExitCheckFailed);
            rows.push_back(j);
        }
    }
    res.summary["status"] = res.status;
    res.primary = res.summary.dump(2) + "\n";
    return res;
}

inline RunResult run_sweep(const RunConfig& c) {
    RunResult res;
    std::ostringstream os;
    os << "model,N_or_L,betaJ,gap,bound,margin,kernel_dim,solver,seconds\n";
    for (int size : c.sizes) {
        const ModelSpec m = build_model(c, size);
        const auto cs = resolve_couplings(c, m);
        for (double bj : c.beta_j) {
            const DaviesGenerator g(m, cs, thermal(c, bj));
            const GapReport r = certify(g, certify_options(c));
            if (!r.converged) raise(res.status, kExitNoConvergence);
            if (!r.certified()) raise(res.status, kExitCheckFailed);
            os << to_string(m.kind) << ',' << size << ',' << fmt(bj) << ',' << fmt(r.gap) << ',' << fmt(r.analytic_bound)
               << ',' << fmt(r.margin()) << ',' << r.kernel_dim << ',' << to_string(r.solver) << ','
               << (c.timing ? fmt(r.elapsed) : std::string("NA")) << '\n';
        }
    }
    res.primary = os.str();
    res.summary["status"] = res.status;
    return res;
}

inline RunResult run_dynamics(const RunConfig& c) {
    RunResult res;
    auto& traces = res.summary["traces"] = nlohmann::json::array();
    std::ostringstream os;
    const bool many = c.sizes.size() * c.beta_j.size() > 1;
    for (int size : c.sizes) {
        const ModelSpec m = build_model(c, size);
        const auto cs = resolve_couplings(c, m);
        const PauliString A = resolve_observable(m, c.observable);
        for (double bj : c.beta_j) {
            const ThermalParams tp = thermal(c, bj);
            const double gap = certify(DaviesGenerator(m, cs, tp), certify_options(c)).gap;
            AutocorrelationTrace tr;
            try {
                tr = autocorrelation(m, tp, cs, A, default_grid(gap, c.points));
            } catch (const DynamicsError& e) {
                if (std::string(e.what()).find("did not converge") != std::string::npos) throw;
                throw ConfigError(e.what());
            }
            nlohmann::json j = to_json(tr);
            j["model"] = m.label();
            j["betaJ"] = bj;
            j["inverse_bound"] = 1.0 / theorem_bound(m, tp);
            const bool schwarz = tr.schwarz_slack >= -1e-10;
            j["schwarz_ok"] = schwarz;
            if (!schwarz) raise(res.status, kExitCheckFailed);
            traces.push_back(j);
            if (many) os << "# " << m.label() << " betaJ=" << bj << " observable=" << tr.label << '\n';
            write_csv(os, tr);
        }
    }
    res.primary = os.str();
    res.summary["status"] = res.status;
    return res;
}

inline RunResult run_export(const RunConfig& c) {
    RunResult res;
    if (c.sizes.size() != 1 || (c.matrix != "none" && c.matrix != "H" && c.beta_j.size() != 1))
        throw ConfigError("export-model takes one size (and one betaJ for K or L)");
    const ModelSpec m = build_model(c, c.sizes.front());
    nlohmann::json j{{"model", to_string(m.kind)}, {"size", m.size}, {"n_sites", m.n_sites}, {"J", m.J}};
    auto& st = j["stabilizers"] = nlohmann::json::array();
    for (std::size_t t = 0; t < m.stabilizers.size(); ++t)
        st.push_back({{"name", m.stabilizer_names[t]},
                      {"pauli", m.stabilizers[t].to_string().substr(1)},
                      {"coefficient", m.coefficients[t]}});
    j["hamiltonian_sign"] = "H = -sum coefficient * pauli";
    auto& lg = j["logicals"] = nlohmann::json::array();
    for (const auto& l : m.logicals) lg.push_back({{"X", l.X.to_string().substr(1)}, {"Z", l.Z.to_string().substr(1)}});
    if (m.partition) j["snake"] = m.partition->snake_sites, j["comb"] = m.partition->comb_sites;
    j["constraints"] = m.constraints;
    if (c.matrix != "none") {
        std::ostringstream os;
        if (c.matrix == "H") {
            to_matrix(m.hamiltonian()).write_coo(os);
            j["matrix"] = {{"name", "H"}, {"basis", "computational, bit j = site j"}};
        } else {
            const DaviesGenerator g(m, resolve_couplings(c, m), thermal(c, c.beta_j.front()));
            const SuperOperatorRep rep = c.matrix == "K" ? to_master(g).rep : build_generator(g);
            rep.matrix.write_coo(os);
            j["matrix"] = {{"name", rep.name}, {"basis", "Pauli strings, index = key = x | z << n"}, {"space", to_string(rep.space)}};
            j["generator"] = g.provenance();
        }
        res.matrix_coo = os.str();
    }
    res.summary = j;
    res.primary = j.dump(2) + "\n";
    return res;
}

} // namespace detail

/// Executes the configured task. Throws ConfigError for usage errors and
/// ConvergenceError/DynamicsError for non-convergence; otherwise the status
/// reflects check and bound failures.
inline RunResult run(const RunConfig& c) {
    validate(c);
    if (c.task == "verify") return detail::run_verify(c);
    if (c.task == "bounds") return detail::run_bounds(c);
    if (c.task == "gap") return detail::run_gap(c);
    if (c.task == "sweep") return detail::run_sweep(c);
    if (c.task == "dynamics") return detail::run_dynamics(c);
    if (c.task == "export-model") return detail::run_export(c);
    throw ConfigError("unknown task '" + c.task + "'");
}

} // namespace davies
