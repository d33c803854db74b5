#include "o2nc/run_io.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <limits>
#include <thread>

#include "json.hpp"
#include "o2nc/analysis.hpp"
#include "o2nc/errors.hpp"
#include "o2nc/stationarity.hpp"

namespace o2nc {

std::string run_mode_name(RunMode m) {
    switch (m) {
        case RunMode::OptionI: return "OPTION_I";
        case RunMode::OptionII: return "OPTION_II";
        case RunMode::OptionIII: return "OPTION_III";
        case RunMode::Anchoring: return "ANCHORING";
        case RunMode::SfSgd: return "SF_SGD";
    }
    return "?";
}

RunMode run_mode_from_name(const std::string& name) {
    if (name == "OPTION_I") return RunMode::OptionI;
    if (name == "OPTION_II") return RunMode::OptionII;
    if (name == "OPTION_III") return RunMode::OptionIII;
    if (name == "ANCHORING") return RunMode::Anchoring;
    if (name == "SF_SGD") return RunMode::SfSgd;
    throw ConfigError("unknown strategy '" + name +
                      "' (OPTION_I, OPTION_II, OPTION_III, ANCHORING, SF_SGD)");
}

std::string trace_mode_name(TraceMode m) {
    switch (m) {
        case TraceMode::None: return "none";
        case TraceMode::Steps: return "steps";
        case TraceMode::Dense: return "dense";
    }
    return "?";
}

TraceMode trace_mode_from_name(const std::string& name) {
    if (name == "none") return TraceMode::None;
    if (name == "steps") return TraceMode::Steps;
    if (name == "dense") return TraceMode::Dense;
    throw ConfigError("unknown trace mode '" + name + "' (none, steps, dense)");
}

double mode_cx_bound(RunMode m) {
    switch (m) {
        case RunMode::OptionI: return 1.0;
        case RunMode::OptionII:
        case RunMode::Anchoring: return 0.0;
        case RunMode::OptionIII:
        case RunMode::SfSgd: return 16.0;
    }
    return 0.0;
}

std::vector<std::size_t> checkpoint_indices(std::size_t T) {
    if (T == 0) return {};
    std::vector<std::size_t> cps;
    for (std::size_t c = 1; c <= T; c *= 2) {
        cps.push_back(c);
        if (c > T / 2) break;
    }
    cps.push_back(std::max<std::size_t>(1, T / 10));
    cps.push_back(T);
    std::sort(cps.begin(), cps.end());
    cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
    return cps;
}

namespace {

using nlohmann::json;

double require_number(const json& j, const char* key) {
    if (!j.at(key).is_number()) throw ConfigError(std::string("'") + key + "' must be a number");
    return j.at(key).get<double>();
}

void reject_unknown(const json& j, const std::vector<std::string>& known, const char* where) {
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError(std::string(where) + " has unknown key '" + key + "'");
    }
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config does not parse as JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(doc,
                   {"schema_version", "problem", "dim", "problem_file", "strategy", "epsilon",
                    "lambda", "sigma", "delta_f", "T", "epochs", "seeds", "master_seed", "x0",
                    "x0_fill", "overrides", "trace", "output_dir"},
                   "config");

    RunConfig cfg;
    if (doc.contains("schema_version")) {
        cfg.schema_version = doc["schema_version"].get<int>();
        if (cfg.schema_version != 1)
            throw ConfigError("unsupported schema_version " + std::to_string(cfg.schema_version));
    }
    if (doc.contains("problem")) cfg.problem = doc["problem"].get<std::string>();
    if (doc.contains("dim")) cfg.dim = doc["dim"].get<std::size_t>();
    if (doc.contains("problem_file")) cfg.problem_file = doc["problem_file"].get<std::string>();
    if (doc.contains("strategy")) cfg.mode = run_mode_from_name(doc["strategy"].get<std::string>());
    if (doc.contains("epsilon")) cfg.epsilon = require_number(doc, "epsilon");
    if (doc.contains("lambda")) cfg.lambda = require_number(doc, "lambda");
    if (doc.contains("sigma")) cfg.sigma = require_number(doc, "sigma");
    if (doc.contains("delta_f") && !doc["delta_f"].is_null())
        cfg.delta_f = require_number(doc, "delta_f");
    if (doc.contains("T")) cfg.T = doc["T"].get<std::size_t>();
    if (doc.contains("epochs")) cfg.epochs = doc["epochs"].get<std::size_t>();
    if (doc.contains("seeds")) cfg.seeds = doc["seeds"].get<std::size_t>();
    if (doc.contains("master_seed")) cfg.master_seed = doc["master_seed"].get<std::uint64_t>();
    if (doc.contains("x0")) {
        if (!doc["x0"].is_array()) throw ConfigError("'x0' must be an array");
        for (const auto& v : doc["x0"]) cfg.x0.push_back(v.get<double>());
    }
    if (doc.contains("x0_fill")) cfg.x0_fill = require_number(doc, "x0_fill");
    if (doc.contains("overrides")) {
        const json& ov = doc["overrides"];
        if (!ov.is_object()) throw ConfigError("'overrides' must be an object");
        reject_unknown(ov, {"beta", "D", "mu", "eta", "gamma"}, "overrides");
        if (ov.contains("beta")) cfg.beta_override = ov["beta"].get<double>();
        if (ov.contains("D")) cfg.d_override = ov["D"].get<double>();
        if (ov.contains("mu")) cfg.mu_override = ov["mu"].get<double>();
        if (ov.contains("eta")) cfg.eta_override = ov["eta"].get<double>();
        if (ov.contains("gamma")) cfg.gamma_override = ov["gamma"].get<double>();
    }
    if (doc.contains("trace")) cfg.trace = trace_mode_from_name(doc["trace"].get<std::string>());
    if (doc.contains("output_dir")) cfg.output_dir = doc["output_dir"].get<std::string>();
    return cfg;
}

std::size_t worker_count() {
    if (const char* env = std::getenv("O2NC_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1)
            throw ConfigError("O2NC_WORKERS must be a positive integer");
        return static_cast<std::size_t>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

Problem problem_from_config(const RunConfig& config) {
    if (!config.problem_file.empty()) return load_piecewise_problem_file(config.problem_file);
    return make_builtin(config.problem, config.dim);
}

Vec x0_from_config(const RunConfig& config, const Problem& problem) {
    if (!config.x0.empty()) {
        if (config.x0.size() != problem.dim)
            throw ConfigError("x0 has dimension " + std::to_string(config.x0.size()) +
                              " but the problem needs " + std::to_string(problem.dim));
        return config.x0;
    }
    return Vec(problem.dim, config.x0_fill.value_or(0.5));
}

namespace {

ParamSet effective_params(const RunConfig& cfg, double G) {
    ParamSet p = derive_params(cfg.epsilon, cfg.lambda, G, cfg.sigma, mode_cx_bound(cfg.mode),
                               cfg.delta_f);
    const bool any_override = cfg.beta_override || cfg.d_override || cfg.mu_override ||
                              cfg.eta_override || cfg.gamma_override;
    if (!any_override) return p;

    if (cfg.gamma_override && cfg.mode != RunMode::SfSgd)
        throw ConfigError("gamma can only be overridden for SF_SGD; conversion strategies derive "
                          "it from eta and zeta");

    bool retune_eta = false;
    if (cfg.beta_override) {
        p.beta_star = *cfg.beta_override;
        retune_eta = true;
    }
    if (cfg.d_override) {
        p.d_star = *cfg.d_override;
        retune_eta = true;
    }
    if (cfg.mu_override) p.mu_star = *cfg.mu_override;
    if (cfg.eta_override)
        p.eta_star = *cfg.eta_override;
    else if (retune_eta)
        p.eta_star = tuned_eta(p.d_star, G, cfg.sigma, p.beta_star);

    if (!(p.beta_star > 0.0 && p.beta_star < 1.0))
        throw ConfigError("overridden beta must lie in (0, 1)");
    if (!(p.eta_star > 0.0)) throw ConfigError("eta must be positive");
    if (p.mu_star < 0.0) throw ConfigError("mu must be nonnegative");
    if (!(p.d_star > 0.0)) throw ConfigError("D must be positive");

    p.zeta_star = p.beta_star / (1.0 + p.eta_star * p.mu_star);
    p.gamma = p.eta_star / (1.0 - p.zeta_star);
    if (cfg.gamma_override) p.gamma = *cfg.gamma_override;
    return p;
}

struct StepRow {
    std::size_t t = 0;
    double mix = 0.0;
    double delta_norm = 0.0, g_norm = 0.0;
    double f_x = 0.0, f_w = 0.0, f_y = 0.0;
    bool has_cert = false;
    double cert = 0.0;
};

// One epoch of trajectory data in mode-independent form.
struct EpochData {
    Vec x0;
    std::vector<Vec> xs, ys, deltas, gs;
    std::vector<double> mix, f_x, f_w, f_y;
    std::size_t rounds() const { return ys.size(); }
};

EpochData epoch_from_trace(const ConversionTrace& trace) {
    EpochData e;
    e.x0 = trace.x0;
    const std::size_t T = trace.rounds();
    e.xs.reserve(T);
    e.ys.reserve(T);
    e.deltas.reserve(T);
    e.gs.reserve(T);
    for (const TraceStep& st : trace.steps) {
        e.xs.push_back(st.x);
        e.ys.push_back(st.y);
        e.deltas.push_back(st.delta);
        e.gs.push_back(st.g);
        e.mix.push_back(st.s);
        e.f_x.push_back(st.f_x);
        e.f_w.push_back(st.f_w);
        e.f_y.push_back(st.f_y);
    }
    return e;
}

EpochData epoch_from_sf(const SfTrace& trace, const Problem& problem, double c) {
    EpochData e;
    e.x0 = trace.x0;
    const std::size_t T = trace.rounds();
    Vec z_pre = trace.x0;  // z_t entering round t
    for (std::size_t t = 1; t <= T; ++t) {
        const SfStepRecord& rec = trace.at(t);
        // Implied learner displacement: Delta_t = c (z_t - x_t) maps the
        // schedule-free state back onto the conversion loop's quantities.
        const Vec delta = scaled(sub(z_pre, rec.x), c);
        const Vec w = add(rec.x, delta);
        e.xs.push_back(rec.x);
        e.ys.push_back(rec.y);
        e.deltas.push_back(delta);
        e.gs.push_back(rec.g);
        e.mix.push_back(rec.kappa);
        e.f_x.push_back(problem.evaluate(rec.x));
        e.f_w.push_back(problem.evaluate(w));
        e.f_y.push_back(problem.evaluate(rec.y));
        z_pre = rec.z_next;
    }
    return e;
}

struct SeedRun {
    SeedResult result;
    std::vector<std::vector<StepRow>> epoch_rows;
};

SeedRun run_one_seed(const RunConfig& cfg, const Problem& problem, const ParamSet& params,
                     const Vec& x0, std::uint64_t seed_index) {
    const auto t_start = std::chrono::steady_clock::now();
    RngStream root(cfg.master_seed, "seed", seed_index);
    RngStream oracle_stream = root.child("oracle");
    RngStream mix_stream = root.child("mix");
    RngStream anchor_stream = root.child("anchor");
    StoGradOracle oracle(problem, cfg.sigma, oracle_stream);

    std::vector<EpochData> epochs;
    switch (cfg.mode) {
        case RunMode::OptionI:
        case RunMode::OptionII:
        case RunMode::OptionIII: {
            StrategyConfig sc;
            sc.kind = cfg.mode == RunMode::OptionI
                          ? Strategy::OptionI
                          : (cfg.mode == RunMode::OptionII ? Strategy::OptionII
                                                           : Strategy::OptionIII);
            sc.zeta = params.zeta_star;
            epochs.push_back(epoch_from_trace(
                run_conversion(problem, oracle, make_learner(params.omd(), problem.dim), sc, cfg.T,
                               x0, mix_stream)));
            break;
        }
        case RunMode::Anchoring: {
            const auto runs = run_anchoring(problem, oracle, params.omd(), cfg.epochs, cfg.T, x0,
                                            mix_stream, anchor_stream);
            for (const AnchoredEpoch& ep : runs) epochs.push_back(epoch_from_trace(ep.trace));
            break;
        }
        case RunMode::SfSgd: {
            SfSgdConfig sf = SfSgdConfig::from_params(params);
            sf.gamma = params.gamma;  // honors a gamma override
            epochs.push_back(epoch_from_sf(
                run_sf_sgd(problem, oracle, sf, cfg.T, x0, mix_stream), problem, sf.c));
            break;
        }
    }

    SeedRun out;
    out.result.seed = seed_index;

    const double beta = params.beta_star;
    double expected_sum = 0.0;
    double stability_max = 0.0;
    double decrement_total = 0.0;
    for (const EpochData& e : epochs) {
        expected_sum += expected_certificate(e.ys, problem, beta, cfg.lambda);
        double num = 0.0, den = 0.0;
        const Vec* prev = &e.x0;
        for (std::size_t t = 0; t < e.rounds(); ++t) {
            num += sq_dist(e.xs[t], *prev);
            den += sq_norm(e.deltas[t]);
            prev = &e.xs[t];
        }
        stability_max = std::max(stability_max, den == 0.0 ? 0.0 : num / den);
        for (std::size_t t = 0; t < e.rounds(); ++t) decrement_total += e.f_x[t] - e.f_w[t];
    }
    out.result.expected_certificate = expected_sum / static_cast<double>(epochs.size());
    out.result.stability_factor = stability_max;
    out.result.loss_decrement = decrement_total;

    // Certificate curve, regret margin and the final value all read the
    // last epoch (the only epoch outside ANCHORING).
    const EpochData& last = epochs.back();
    const std::size_t T = last.rounds();
    std::vector<Vec> grads;
    grads.reserve(T);
    for (const Vec& y : last.ys) grads.push_back(problem.gradient_at(y));
    const std::vector<std::size_t> cps = checkpoint_indices(T);

    out.result.certificate_at_t10 = stationarity_certificate(
        last.ys, problem, beta, cfg.lambda, std::max<std::size_t>(1, T / 10), &grads);
    out.result.certificate_at_t =
        stationarity_certificate(last.ys, problem, beta, cfg.lambda, T, &grads);
    out.result.final_value = last.f_y.back();

    {
        RegretLedger ledger(beta, params.mu_star);
        for (std::size_t t = 0; t < T; ++t) ledger.record(last.gs[t], last.deltas[t]);
        const ComparatorSequence comp = comparator_sequence(last.ys, problem, beta, params.d_star);
        const double bound =
            regret_bound_rhs(params.d_star, problem.lipschitz_G, cfg.sigma, beta, params.mu_star);
        double margin = std::numeric_limits<double>::infinity();
        for (std::size_t cp : cps)
            margin = std::min(margin, bound - ledger.discounted_regret(comp.u[cp - 1], cp));
        out.result.regret_margin = margin;
    }

    if (cfg.trace != TraceMode::None) {
        for (const EpochData& e : epochs) {
            std::vector<Vec> egrads;
            egrads.reserve(e.rounds());
            for (const Vec& y : e.ys) egrads.push_back(problem.gradient_at(y));
            const std::vector<std::size_t> ecds = checkpoint_indices(e.rounds());
            std::vector<StepRow> rows;
            rows.reserve(e.rounds());
            for (std::size_t t = 1; t <= e.rounds(); ++t) {
                StepRow row;
                row.t = t;
                row.mix = e.mix[t - 1];
                row.delta_norm = norm(e.deltas[t - 1]);
                row.g_norm = norm(e.gs[t - 1]);
                row.f_x = e.f_x[t - 1];
                row.f_w = e.f_w[t - 1];
                row.f_y = e.f_y[t - 1];
                const bool want_cert =
                    cfg.trace == TraceMode::Dense ||
                    std::binary_search(ecds.begin(), ecds.end(), t);
                if (want_cert) {
                    row.has_cert = true;
                    row.cert =
                        stationarity_certificate(e.ys, problem, beta, cfg.lambda, t, &egrads);
                }
                rows.push_back(row);
            }
            out.epoch_rows.push_back(std::move(rows));
        }
    }

    out.result.wall_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t_start)
                             .count();
    return out;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_text(const std::vector<StepRow>& rows) {
    std::string s = "t,s_or_kappa,delta_norm,g_norm,f_x,f_w,f_y,certificate\n";
    for (const StepRow& r : rows) {
        s += std::to_string(r.t);
        s += ',';
        s += fmt17(r.mix);
        s += ',';
        s += fmt17(r.delta_norm);
        s += ',';
        s += fmt17(r.g_norm);
        s += ',';
        s += fmt17(r.f_x);
        s += ',';
        s += fmt17(r.f_w);
        s += ',';
        s += fmt17(r.f_y);
        s += ',';
        if (r.has_cert) s += fmt17(r.cert);
        s += '\n';
    }
    return s;
}

json config_json(const RunConfig& cfg) {
    json j;
    j["schema_version"] = cfg.schema_version;
    j["problem"] = cfg.problem;
    j["dim"] = cfg.dim;
    j["problem_file"] = cfg.problem_file;
    j["strategy"] = run_mode_name(cfg.mode);
    j["epsilon"] = cfg.epsilon;
    j["lambda"] = cfg.lambda;
    j["sigma"] = cfg.sigma;
    j["delta_f"] = cfg.delta_f ? json(*cfg.delta_f) : json(nullptr);
    j["T"] = cfg.T;
    j["epochs"] = cfg.epochs;
    j["seeds"] = cfg.seeds;
    j["master_seed"] = cfg.master_seed;
    j["x0"] = cfg.x0;
    j["x0_fill"] = cfg.x0_fill ? json(*cfg.x0_fill) : json(nullptr);
    json ov;
    ov["beta"] = cfg.beta_override ? json(*cfg.beta_override) : json(nullptr);
    ov["D"] = cfg.d_override ? json(*cfg.d_override) : json(nullptr);
    ov["mu"] = cfg.mu_override ? json(*cfg.mu_override) : json(nullptr);
    ov["eta"] = cfg.eta_override ? json(*cfg.eta_override) : json(nullptr);
    ov["gamma"] = cfg.gamma_override ? json(*cfg.gamma_override) : json(nullptr);
    j["overrides"] = ov;
    j["trace"] = trace_mode_name(cfg.trace);
    j["output_dir"] = cfg.output_dir;
    return j;
}

json params_json_obj(const ParamSet& p) {
    json j;
    j["epsilon"] = p.epsilon;
    j["lambda"] = p.lambda;
    j["G"] = p.G;
    j["sigma"] = p.sigma;
    j["c_x_bound"] = p.c_x_bound;
    j["delta_f"] = p.delta_f ? json(*p.delta_f) : json(nullptr);
    j["beta_star"] = p.beta_star;
    j["d_star"] = p.d_star;
    j["mu_star"] = p.mu_star;
    j["eta_star"] = p.eta_star;
    j["zeta_star"] = p.zeta_star;
    j["gamma"] = p.gamma;
    j["t_min"] = p.t_min;
    return j;
}

}  // namespace

std::string param_set_json(const ParamSet& p) {
    json j = params_json_obj(p);
    j["schema_version"] = 1;
    return j.dump(2) + "\n";
}

ParamSet param_set_from_json(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("parameter JSON does not parse: ") + e.what());
    }
    ParamSet p;
    p.epsilon = require_number(doc, "epsilon");
    p.lambda = require_number(doc, "lambda");
    p.G = require_number(doc, "G");
    p.sigma = require_number(doc, "sigma");
    p.c_x_bound = require_number(doc, "c_x_bound");
    if (doc.contains("delta_f") && !doc["delta_f"].is_null())
        p.delta_f = doc["delta_f"].get<double>();
    p.beta_star = require_number(doc, "beta_star");
    p.d_star = require_number(doc, "d_star");
    p.mu_star = require_number(doc, "mu_star");
    p.eta_star = require_number(doc, "eta_star");
    p.zeta_star = require_number(doc, "zeta_star");
    p.gamma = require_number(doc, "gamma");
    p.t_min = doc.at("t_min").get<long long>();
    return p;
}

std::string summary_json(const RunOutput& out) {
    json j;
    j["schema_version"] = 1;
    j["config"] = config_json(out.config);
    j["params"] = params_json_obj(out.params);
    j["problem_G"] = out.problem_G;
    json seeds = json::array();
    for (const SeedResult& s : out.seeds) {
        json sj;
        sj["seed"] = s.seed;
        sj["expected_certificate"] = s.expected_certificate;
        sj["certificate_at_t10"] = s.certificate_at_t10;
        sj["certificate_at_t"] = s.certificate_at_t;
        sj["stability_factor"] = s.stability_factor;
        sj["regret_margin"] = s.regret_margin;
        sj["loss_decrement"] = s.loss_decrement;
        sj["final_value"] = s.final_value;
        seeds.push_back(sj);
    }
    j["seeds"] = seeds;
    json agg;
    auto put = [&agg](const char* key, const MeanSem& m) {
        agg[key] = {{"mean", m.mean}, {"sem", m.sem}, {"n", m.n}};
    };
    put("expected_certificate", out.expected_certificate);
    put("certificate_at_t", out.certificate_at_t);
    put("stability_factor", out.stability);
    j["aggregate"] = agg;
    return j.dump(2) + "\n";
}

RunOutput execute_run(const RunConfig& cfg) {
    if (cfg.T == 0) throw ConfigError("T must be positive");
    if (cfg.seeds == 0) throw ConfigError("at least one seed is required");
    if (cfg.epochs == 0) throw ConfigError("epochs must be positive");
    if (cfg.epochs > 1 && cfg.mode != RunMode::Anchoring)
        throw ConfigError("multiple epochs only apply to ANCHORING");

    RunOutput out;
    out.config = cfg;
    const Problem problem = problem_from_config(cfg);
    out.problem_G = problem.lipschitz_G;
    out.params = effective_params(cfg, problem.lipschitz_G);
    const Vec x0 = x0_from_config(cfg, problem);

    if (static_cast<long long>(cfg.T) < out.params.t_min)
        std::cerr << "warning: T = " << cfg.T << " is below the covered horizon t_min = "
                  << out.params.t_min << "\n";

    const bool write = !cfg.output_dir.empty();
    if (write) std::filesystem::create_directories(cfg.output_dir);

    const std::size_t workers = std::min<std::size_t>(worker_count(), cfg.seeds);
    std::vector<double> certs, certs_at_t, stabs;

    auto consume = [&](std::uint64_t k, SeedRun&& run) {
        // Collector: runs on the main thread in seed order, so artifact
        // bytes never depend on scheduling.
        if (write) {
            std::cerr << "seed " << k << " done in " << run.result.wall_ms << " ms\n";
            for (std::size_t e = 0; e < run.epoch_rows.size(); ++e) {
                std::string name = "trace_seed" + std::to_string(k);
                if (cfg.mode == RunMode::Anchoring) name += "_epoch" + std::to_string(e);
                name += ".csv";
                std::ofstream f(std::filesystem::path(cfg.output_dir) / name);
                if (!f) throw ConfigError("cannot write trace file in '" + cfg.output_dir + "'");
                f << csv_text(run.epoch_rows[e]);
            }
        }
        certs.push_back(run.result.expected_certificate);
        certs_at_t.push_back(run.result.certificate_at_t);
        stabs.push_back(run.result.stability_factor);
        out.seeds.push_back(run.result);
    };

    if (workers <= 1) {
        for (std::uint64_t k = 0; k < cfg.seeds; ++k)
            consume(k, run_one_seed(cfg, problem, out.params, x0, k));
    } else {
        for (std::uint64_t base = 0; base < cfg.seeds; base += workers) {
            const std::uint64_t hi = std::min<std::uint64_t>(base + workers, cfg.seeds);
            std::vector<std::future<SeedRun>> batch;
            for (std::uint64_t k = base; k < hi; ++k)
                batch.push_back(std::async(std::launch::async, [&, k] {
                    return run_one_seed(cfg, problem, out.params, x0, k);
                }));
            for (std::uint64_t k = base; k < hi; ++k) consume(k, batch[k - base].get());
        }
    }

    out.expected_certificate = mean_sem(certs);
    out.certificate_at_t = mean_sem(certs_at_t);
    out.stability = mean_sem(stabs);

    if (write) {
        std::ofstream f(std::filesystem::path(cfg.output_dir) / "summary.json");
        if (!f) throw ConfigError("cannot write summary in '" + cfg.output_dir + "'");
        f << summary_json(out);
    }
    return out;
}

}  // namespace o2nc
