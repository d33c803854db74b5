#include "o2nc/verify.hpp"

#include <cmath>
#include <sstream>

#include "json.hpp"
#include "o2nc/analysis.hpp"
#include "o2nc/errors.hpp"
#include "o2nc/run_io.hpp"
#include "o2nc/stats.hpp"

namespace o2nc {

namespace {

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

struct SmallRun {
    Strategy kind;
    ConversionTrace trace;
    ParamSet params;
};

SmallRun small_run(Strategy kind, std::uint64_t master_seed, std::uint64_t salt, std::size_t T) {
    const Problem problem = make_abs_sum(6);
    const double sigma = 0.2;
    SmallRun r;
    r.kind = kind;
    const double cx = kind == Strategy::OptionI ? 1.0 : (kind == Strategy::OptionII ? 0.0 : 16.0);
    r.params = derive_params(0.8, 1.0, problem.lipschitz_G, sigma, cx);
    RngStream root(master_seed, "verify", salt);
    RngStream oracle_stream = root.child("oracle");
    RngStream mix = root.child("mix");
    StoGradOracle oracle(problem, sigma, oracle_stream);
    StrategyConfig sc{kind, r.params.zeta_star};
    r.trace = run_conversion(problem, oracle, make_learner(r.params.omd(), problem.dim), sc, T,
                             Vec(problem.dim, 0.7), mix);
    return r;
}

// Composite mirror-descent step with time-varying constants:
//   Delta' = (Delta - eta_t v_t) / (1 + eta_t mu_{t+1} + eta_t (1/eta_{t+1} - 1/eta_t)).
Vec composite_omd_step(const Vec& delta, const Vec& v, double eta_t, double eta_next,
                       double mu_next) {
    const double denom = 1.0 + eta_t * mu_next + eta_t * (1.0 / eta_next - 1.0 / eta_t);
    Vec r(delta.size());
    for (std::size_t i = 0; i < delta.size(); ++i) r[i] = (delta[i] - eta_t * v[i]) / denom;
    return r;
}

}  // namespace

SuiteReport verify_identities(std::uint64_t master_seed) {
    SuiteReport rep;
    rep.suite = "identities";
    const std::size_t T = 60;

    const SmallRun opt1 = small_run(Strategy::OptionI, master_seed, 1, T);
    const SmallRun opt2 = small_run(Strategy::OptionII, master_seed, 2, T);
    const SmallRun opt3 = small_run(Strategy::OptionIII, master_seed, 3, T);

    {
        double worst = 0.0;
        for (const SmallRun* r : {&opt1, &opt2, &opt3})
            for (const TraceStep& st : r->trace.steps) {
                worst = std::max(worst, norm(sub(st.w, add(st.x, st.delta))));
                worst = std::max(worst, norm(sub(st.y, axpy(st.x, st.s, st.delta))));
            }
        rep.checks.push_back({"candidate_and_probe_construction", worst == 0.0,
                              "max deviation " + num(worst)});
    }
    {
        // Frozen and incremental anchors pay a telescoping loss decrement.
        const double sum = loss_decrement_sum(opt1.trace);
        const Problem problem = make_abs_sum(6);
        const double direct = problem.evaluate(opt1.trace.x0) -
                              problem.evaluate(opt1.trace.steps.back().w);
        const double dev = std::fabs(sum - direct);
        rep.checks.push_back({"incremental_anchor_telescoping", dev <= 1e-10,
                              "deviation " + num(dev)});
    }
    {
        // x_t - w_{t-1} = -eta g_{t-1} for the contraction-corrected anchor.
        const double eta = opt3.params.eta_star;
        double worst = 0.0;
        for (std::size_t t = 2; t <= T; ++t) {
            const TraceStep& cur = opt3.trace.at(t);
            const TraceStep& prev = opt3.trace.at(t - 1);
            const Vec lhs = sub(cur.x, prev.w);
            const double scale = std::max({1.0, norm(cur.x), norm(prev.w)});
            worst = std::max(worst, norm(axpy(lhs, eta, prev.g)) / scale);
        }
        rep.checks.push_back({"incremental_correction_cancellation", worst <= 1e-12,
                              "max relative deviation " + num(worst)});
    }
    {
        const CxRow r1 = cx_row(Strategy::OptionI, opt1.trace, opt1.params.zeta_star);
        const CxRow r2 = cx_row(Strategy::OptionII, opt2.trace, opt2.params.zeta_star);
        const CxRow r3 = cx_row(Strategy::OptionIII, opt3.trace, opt3.params.zeta_star);
        rep.checks.push_back({"stability_factors", r1.pass && r2.pass && r3.pass,
                              "measured " + num(r1.measured) + " / " + num(r2.measured) + " / " +
                                  num(r3.measured)});
    }
    {
        // Extrapolated iterates follow plain SGD steps: z_{t+1} - z_t = -gamma g_t.
        const double zeta = opt3.params.zeta_star;
        const double gamma = opt3.params.eta_star / (1.0 - zeta);
        double worst = 0.0;
        for (std::size_t t = 1; t + 1 <= T; ++t) {
            const TraceStep& cur = opt3.trace.at(t);
            const TraceStep& nxt = opt3.trace.at(t + 1);
            const Vec z_cur = extrapolate_z(cur.x, cur.delta, zeta);
            const Vec z_nxt = extrapolate_z(nxt.x, nxt.delta, zeta);
            const double scale = std::max(1.0, norm(z_cur));
            worst = std::max(worst, norm(axpy(sub(z_nxt, z_cur), gamma, cur.g)) / scale);
        }
        rep.checks.push_back({"extrapolated_sgd_recursion", worst <= 1e-10,
                              "max relative deviation " + num(worst)});
    }
    {
        // The contraction form Delta' = zeta (Delta - eta g) agrees with the
        // composite recursion under eta_t = beta^t eta, mu_t = beta^{-t} mu,
        // v_t = beta^{-t} g_t.
        RngStream rng(master_seed, "composite");
        double worst = 0.0;
        for (int trial = 0; trial < 200; ++trial) {
            const double beta = rng.next_uniform(0.5, 0.995);
            const double eta = rng.next_uniform(0.01, 2.0);
            const double mu = rng.next_uniform(0.0, 3.0);
            const int t = 1 + static_cast<int>(rng.next_uniform() * 30.0);
            Vec delta = rng.next_normal_vec(4);
            Vec g = rng.next_normal_vec(4);
            const OmdParams p{eta, mu, beta};
            const Vec direct = omd_step(LearnerState{p, delta}, g).delta;
            const double bt = std::pow(beta, t);
            const Vec general = composite_omd_step(delta, scaled(g, 1.0 / bt), bt * eta,
                                                   bt * beta * eta, mu / (bt * beta));
            const double scale = 1.0 + norm(delta) + eta * norm(g);
            worst = std::max(worst, norm(sub(direct, general)) / scale);
        }
        rep.checks.push_back({"composite_recursion_consistency", worst <= 1e-12,
                              "max relative deviation " + num(worst)});
    }
    {
        RngStream rng(master_seed, "ema");
        double worst = 0.0;
        for (double beta : {0.3, 0.9, 0.995}) {
            std::vector<Vec> ys;
            EmaAccumulator acc(beta, 3);
            for (std::size_t t = 1; t <= 40; ++t) {
                ys.push_back(rng.next_normal_vec(3));
                acc.push(ys.back());
                worst = std::max(worst, norm(sub(acc.value(), ema(ys, beta, t))));
            }
        }
        rep.checks.push_back({"ema_streaming_matches_batch", worst <= 1e-12,
                              "max deviation " + num(worst)});
    }
    {
        double worst = 0.0;
        for (double beta : {0.1, 0.5, 0.9, 0.999})
            for (std::size_t t : {std::size_t(1), std::size_t(7), std::size_t(100)}) {
                const auto q = q_weights(beta, t);
                double sum = 0.0;
                for (double w : q) sum += w;
                worst = std::max(worst, std::fabs(sum - 1.0));
            }
        rep.checks.push_back({"averaging_weights_normalized", worst <= 1e-12,
                              "max |sum - 1| " + num(worst)});
    }
    {
        double worst = 0.0;
        for (double beta : {0.5, 0.9, 0.99, 0.999})
            for (std::size_t T2 : {std::size_t(1), std::size_t(2), std::size_t(10),
                                   std::size_t(1000)})
                worst = std::max(worst, std::fabs(IndexLaw(beta, T2).total_mass() - 1.0));
        rep.checks.push_back({"index_law_mass", worst <= 1e-12, "max |mass - 1| " + num(worst)});
    }
    {
        // Negative controls: bad setups must be rejected.
        const Problem problem = make_abs_sum(3);
        bool nonzero_rejected = false;
        try {
            RngStream mix(master_seed, "neg1");
            StoGradOracle oracle(problem, 0.0, RngStream(master_seed, "neg1o"));
            LearnerState learner = make_learner(OmdParams{0.1, 1.0, 0.9}, 3);
            learner.delta[0] = 0.5;
            run_conversion(problem, oracle, learner, StrategyConfig{Strategy::OptionI, 0.0}, 3,
                           zeros(3), mix);
        } catch (const ConfigError&) {
            nonzero_rejected = true;
        }
        bool mismatch_rejected = false;
        try {
            RngStream mix(master_seed, "neg2");
            StoGradOracle oracle(problem, 0.0, RngStream(master_seed, "neg2o"));
            const OmdParams p{0.1, 1.0, 0.9};
            run_conversion(problem, oracle, make_learner(p, 3),
                           StrategyConfig{Strategy::OptionIII, omd_zeta(p) * 1.01}, 3, zeros(3),
                           mix);
        } catch (const ConfigError&) {
            mismatch_rejected = true;
        }
        rep.checks.push_back({"invalid_setups_rejected", nonzero_rejected && mismatch_rejected,
                              "nonzero start and zeta mismatch both raise config errors"});
    }
    return rep;
}

SuiteReport verify_appendix(std::uint64_t master_seed) {
    SuiteReport rep;
    rep.suite = "appendix";
    {
        const LambdaGridReport g = lambda_bound_check({0.3, 0.5, 0.9, 0.99}, 200);
        rep.checks.push_back({"lag_coefficient_closed_form", g.closed_form_ok,
                              "max relative deviation " + num(g.max_rel_dev) + " over " +
                                  std::to_string(g.cells) + " cells"});
        rep.checks.push_back({"lag_coefficient_bound", g.bound_ok,
                              "max coefficient/bound ratio " + num(g.max_bound_ratio)});
    }
    {
        double worst = 0.0;
        for (double beta : {0.5, 0.9, 0.99, 0.999})
            for (std::size_t T : {std::size_t(1), std::size_t(2), std::size_t(10),
                                  std::size_t(1000)})
                worst = std::max(worst, std::fabs(IndexLaw(beta, T).total_mass() - 1.0));
        rep.checks.push_back({"index_law_mass_grid", worst <= 1e-12,
                              "max |mass - 1| " + num(worst)});
    }
    {
        // Empirical index frequencies against the law.
        const double beta = 0.9;
        const std::size_t T = 10, n = 1000000;
        const IndexLaw law(beta, T);
        RngStream stream(master_seed, "law");
        std::vector<std::size_t> counts(T, 0);
        for (std::size_t i = 0; i < n; ++i) ++counts[law.sample(stream) - 1];
        double worst_sigmas = 0.0;
        for (std::size_t t = 1; t <= T; ++t) {
            const double p = law.p(t);
            const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
            const double freq = static_cast<double>(counts[t - 1]) / static_cast<double>(n);
            worst_sigmas = std::max(worst_sigmas, std::fabs(freq - p) / se);
        }
        rep.checks.push_back({"index_law_frequencies", worst_sigmas <= 4.0,
                              "worst deviation " + num(worst_sigmas) + " SE"});
    }
    {
        bool all_hold = true;
        double tightest = 1e300;
        for (std::uint64_t salt = 0; salt < 3; ++salt) {
            for (Strategy kind :
                 {Strategy::OptionI, Strategy::OptionII, Strategy::OptionIII}) {
                const SmallRun r = small_run(kind, master_seed + salt, 40 + salt, 80);
                std::vector<Vec> xs, ys;
                for (const TraceStep& st : r.trace.steps) {
                    xs.push_back(st.x);
                    ys.push_back(st.y);
                }
                for (std::size_t t = 1; t <= ys.size(); ++t) {
                    const VarianceDecomposition v =
                        variance_decomposition_check(xs, ys, r.params.beta_star, t);
                    all_hold = all_hold && v.holds;
                    tightest = std::min(tightest, v.rhs - v.lhs);
                }
            }
        }
        rep.checks.push_back({"variance_decomposition", all_hold,
                              "smallest rhs - lhs gap " + num(tightest)});
    }
    return rep;
}

SuiteReport verify_regret(std::uint64_t master_seed, std::size_t seeds) {
    SuiteReport rep;
    rep.suite = "regret";

    const Problem problem = make_abs_sum(10);
    const double sigma = 0.1;
    const ParamSet params = derive_params(1.0, 1.0, problem.lipschitz_G, sigma, 1.0);
    const std::size_t T = 1000;
    const std::vector<std::size_t> cps = checkpoint_indices(T);
    const double bound = regret_bound_rhs(params.d_star, problem.lipschitz_G, sigma,
                                          params.beta_star, params.mu_star);

    std::vector<std::vector<double>> regrets(cps.size());
    for (std::uint64_t k = 0; k < seeds; ++k) {
        RngStream root(master_seed, "regret-seed", k);
        RngStream oracle_stream = root.child("oracle");
        RngStream mix = root.child("mix");
        StoGradOracle oracle(problem, sigma, oracle_stream);
        const ConversionTrace trace = run_conversion(
            problem, oracle, make_learner(params.omd(), problem.dim),
            StrategyConfig{Strategy::OptionI, 0.0}, T, Vec(problem.dim, 0.5), mix,
            /*record_loss=*/false);

        RegretLedger ledger(params.beta_star, params.mu_star);
        for (const TraceStep& st : trace.steps) ledger.record(st.g, st.delta);
        const ComparatorSequence comp =
            comparator_sequence(trace, problem, params.beta_star, params.d_star);
        for (std::size_t c = 0; c < cps.size(); ++c)
            regrets[c].push_back(ledger.discounted_regret(comp.u[cps[c] - 1], cps[c]));
    }

    double min_margin = 1e300;
    std::size_t worst_cp = 0;
    bool ok = true;
    for (std::size_t c = 0; c < cps.size(); ++c) {
        const MeanSem m = mean_sem(regrets[c]);
        const double margin = bound + 3.0 * m.sem - m.mean;
        if (margin < min_margin) {
            min_margin = margin;
            worst_cp = cps[c];
        }
        ok = ok && margin >= 0.0;
    }
    rep.checks.push_back({"discounted_regret_bound", ok,
                          "min margin " + num(min_margin) + " at checkpoint t = " +
                              std::to_string(worst_cp) + " (bound " + num(bound) + ")"});
    return rep;
}

SuiteReport verify_equivalence_suite(std::uint64_t master_seed) {
    SuiteReport rep;
    rep.suite = "equivalence";

    const Problem problem = make_abs_sum(10);
    const double sigma = 0.1;
    const ParamSet params = derive_params(1.0, 1.0, problem.lipschitz_G, sigma, 16.0);
    const Vec x0(problem.dim, 0.5);
    const std::size_t T = 500;

    const EquivalenceReport eq = verify_equivalence(problem, sigma, params, T, x0, master_seed);
    rep.checks.push_back({"pathwise_equivalence", eq.pass,
                          "max relative discrepancy x/y/z " + num(eq.max_rel_x) + " / " +
                              num(eq.max_rel_y) + " / " + num(eq.max_rel_z)});

    {
        // Negative control: a mismatched step size must be detected.
        StoGradOracle oracle_a(problem, sigma, RngStream(master_seed, "oracle"));
        RngStream mix_a(master_seed, "mix");
        const ConversionTrace conv = run_conversion(
            problem, oracle_a, make_learner(params.omd(), problem.dim),
            StrategyConfig{Strategy::OptionIII, params.zeta_star}, T, x0, mix_a,
            /*record_loss=*/false);

        StoGradOracle oracle_b(problem, sigma, RngStream(master_seed, "oracle"));
        RngStream mix_b(master_seed, "mix");
        SfSgdConfig sf = SfSgdConfig::from_params(params);
        sf.gamma *= 2.0;
        const SfTrace wrong = run_sf_sgd(problem, oracle_b, sf, T, x0, mix_b);

        double max_rel = 0.0;
        Vec z_sf = x0;
        for (std::size_t t = 1; t <= T; ++t) {
            const TraceStep& cs = conv.at(t);
            const Vec z_conv = extrapolate_z(cs.x, cs.delta, params.zeta_star);
            max_rel = std::max(max_rel, norm(sub(z_conv, z_sf)) / (1.0 + norm(cs.x)));
            z_sf = wrong.at(t).z_next;
        }
        rep.checks.push_back({"mismatch_detected", max_rel > 1e-6,
                              "doubled step size drifts by " + num(max_rel)});
    }
    {
        // kappa draws stay inside [zeta, 1].
        StoGradOracle oracle(problem, sigma, RngStream(master_seed, "oracle-k"));
        RngStream mix(master_seed, "mix-k");
        const SfTrace sf = run_sf_sgd(problem, oracle, SfSgdConfig::from_params(params), 200, x0,
                                      mix);
        double lo = 1.0, hi = 0.0;
        for (const SfStepRecord& rec : sf.steps) {
            lo = std::min(lo, rec.kappa);
            hi = std::max(hi, rec.kappa);
        }
        const bool ok = lo >= params.zeta_star && hi <= 1.0;
        rep.checks.push_back({"kappa_in_range", ok,
                              "observed kappa in [" + num(lo) + ", " + num(hi) + "], zeta = " +
                                  num(params.zeta_star)});
    }
    return rep;
}

SuiteReport validate_params_json(const std::string& json_text) {
    SuiteReport rep;
    rep.suite = "params";
    ParamSet stated;
    try {
        stated = param_set_from_json(json_text);
    } catch (const std::exception& e) {
        rep.checks.push_back({"parse", false, e.what()});
        return rep;
    }
    ParamSet fresh;
    try {
        fresh = derive_params(stated.epsilon, stated.lambda, stated.G, stated.sigma,
                              stated.c_x_bound, stated.delta_f);
    } catch (const std::exception& e) {
        rep.checks.push_back({"derivable", false, e.what()});
        return rep;
    }
    auto close = [](double a, double b) {
        return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
    };
    auto check = [&](const char* name, double got, double want) {
        rep.checks.push_back({name, close(got, want),
                              "stated " + num(got) + ", recomputed " + num(want)});
    };
    check("beta_star", stated.beta_star, fresh.beta_star);
    check("d_star", stated.d_star, fresh.d_star);
    check("mu_star", stated.mu_star, fresh.mu_star);
    check("eta_star", stated.eta_star, fresh.eta_star);
    check("zeta_star", stated.zeta_star, fresh.zeta_star);
    check("gamma", stated.gamma, fresh.gamma);
    rep.checks.push_back({"t_min", stated.t_min == fresh.t_min,
                          "stated " + std::to_string(stated.t_min) + ", recomputed " +
                              std::to_string(fresh.t_min)});
    {
        // Step size times strength collapses to epsilon^2 / (7 (G+sigma)^2).
        const double gs = stated.G + stated.sigma;
        const double want = stated.epsilon * stated.epsilon / (7.0 * gs * gs);
        const double got = stated.eta_star * stated.mu_star;
        rep.checks.push_back({"eta_mu_identity", close(got, want),
                              "eta*mu " + num(got) + ", epsilon^2/(7(G+sigma)^2) " + num(want)});
    }
    return rep;
}

std::string suite_report_json(const SuiteReport& report) {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["suite"] = report.suite;
    j["pass"] = report.pass();
    nlohmann::json checks = nlohmann::json::array();
    for (const CheckResult& c : report.checks)
        checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["checks"] = checks;
    return j.dump(2) + "\n";
}

}  // namespace o2nc
