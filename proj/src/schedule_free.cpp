#include "o2nc/schedule_free.hpp"

#include <cmath>

#include "o2nc/errors.hpp"

namespace o2nc {

ParamSet derive_params(double epsilon, double lambda, double G, double sigma,
                       double c_x_bound, std::optional<double> delta_f) {
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (!(G + sigma > 0.0)) throw ConfigError("G + sigma must be positive");
    if (sigma < 0.0) throw ConfigError("sigma must be nonnegative");
    if (c_x_bound < 0.0) throw ConfigError("the stability bound c_x must be nonnegative");
    if (delta_f && !(*delta_f > 0.0)) throw ConfigError("delta_f must be positive when supplied");

    const double gs = G + sigma;
    if (epsilon > 3.5 * gs)
        throw RegimeError("accuracy out of regime: epsilon <= (7/2)(G + sigma) required, got epsilon = " +
                          std::to_string(epsilon) + " with G + sigma = " + std::to_string(gs));

    ParamSet p;
    p.epsilon = epsilon;
    p.lambda = lambda;
    p.G = G;
    p.sigma = sigma;
    p.c_x_bound = c_x_bound;
    p.delta_f = delta_f;

    const double root_alpha = epsilon / (7.0 * gs);
    const double alpha = root_alpha * root_alpha;        // 1 - beta
    const double K = 1.0 + std::sqrt(c_x_bound) / alpha;  // 1 + 49 (G+s)^2 sqrt(C_x) / eps^2
    p.beta_star = 1.0 - alpha;
    p.d_star = 0.25 * std::sqrt(epsilon / lambda) / K;
    p.mu_star = 2.0 * std::sqrt(lambda * epsilon) * K;
    p.eta_star = 2.0 / gs * p.d_star * root_alpha;
    p.zeta_star = p.beta_star / (1.0 + p.eta_star * p.mu_star);
    p.gamma = p.eta_star / (1.0 - p.zeta_star);

    double horizon = 49.0 * gs * gs / (epsilon * epsilon);
    if (delta_f) {
        const double rate = 980.0 * gs * gs * (*delta_f) * std::sqrt(lambda) /
                            (epsilon * epsilon * epsilon * std::sqrt(epsilon));
        horizon = std::max(horizon, rate);
    }
    // Snap to the nearest integer when rounding noise is all that separates
    // us from it (e.g. 49/0.7^2 evaluates to 100 + 1.4e-14), then take the
    // ceiling of what remains genuinely fractional.
    const double nearest = std::nearbyint(horizon);
    if (std::abs(horizon - nearest) <= 1e-9 * std::max(1.0, std::abs(horizon)))
        p.t_min = static_cast<long long>(nearest);
    else
        p.t_min = static_cast<long long>(std::ceil(horizon));
    return p;
}

SfSgdConfig SfSgdConfig::from_params(const ParamSet& p) {
    SfSgdConfig cfg;
    cfg.gamma = p.gamma;
    cfg.c = 1.0 - p.zeta_star;
    cfg.kappa_lo = p.zeta_star;
    cfg.kappa_hi = 1.0;
    return cfg;
}

SfStepRecord sf_sgd_step(SfSgdState& state, const SfSgdConfig& cfg, StoGradOracle& oracle,
                         RngStream& kappa_stream) {
    if (!(cfg.kappa_lo <= cfg.kappa_hi) || cfg.kappa_lo < 0.0 || cfg.kappa_hi > 1.0)
        throw ConfigError("kappa law must satisfy 0 <= kappa_lo <= kappa_hi <= 1");

    SfStepRecord rec;
    // x_t = (1 - c) x_{t-1} + c z_t
    rec.x = Vec(state.x.size());
    for (std::size_t i = 0; i < rec.x.size(); ++i)
        rec.x[i] = (1.0 - cfg.c) * state.x[i] + cfg.c * state.z[i];

    // The descending map kappa = hi - u (hi - lo) couples a shared uniform
    // stream with the conversion loop's s_t draw.
    const double u = kappa_stream.next_uniform();
    rec.kappa = cfg.kappa_hi - u * (cfg.kappa_hi - cfg.kappa_lo);
    if (rec.kappa < cfg.kappa_lo || rec.kappa > cfg.kappa_hi)
        throw std::logic_error("kappa sample left its interval");

    rec.y = Vec(rec.x.size());
    for (std::size_t i = 0; i < rec.y.size(); ++i)
        rec.y[i] = rec.kappa * rec.x[i] + (1.0 - rec.kappa) * state.z[i];

    rec.g = oracle.sample(rec.y);
    rec.z_next = axpy(state.z, -cfg.gamma, rec.g);
    state.x = rec.x;
    state.z = rec.z_next;
    return rec;
}

SfTrace run_sf_sgd(const Problem& problem, StoGradOracle& oracle, const SfSgdConfig& cfg,
                   std::size_t T, const Vec& x0, RngStream& kappa_stream) {
    if (x0.size() != problem.dim) throw ConfigError("x0 dimension does not match the problem");
    SfTrace trace;
    trace.x0 = x0;
    trace.steps.reserve(T);
    SfSgdState state = make_sf_state(x0);
    for (std::size_t t = 1; t <= T; ++t) {
        trace.steps.push_back(sf_sgd_step(state, cfg, oracle, kappa_stream));
        const SfStepRecord& rec = trace.steps.back();
        if (!all_finite(rec.x) || !all_finite(rec.z_next) || !all_finite(rec.g))
            throw DivergenceError("schedule-free iterate became non-finite",
                                  static_cast<long long>(t));
    }
    return trace;
}

Vec extrapolate_z(const Vec& x, const Vec& delta, double zeta) {
    if (!(zeta < 1.0)) throw ConfigError("extrapolation needs zeta < 1");
    return axpy(x, 1.0 / (1.0 - zeta), delta);
}

EquivalenceReport verify_equivalence(const Problem& problem, double sigma, const ParamSet& params,
                                     std::size_t T, const Vec& x0, std::uint64_t master_seed,
                                     double tol) {
    const double zeta = params.zeta_star;

    // Conversion side: incremental anchors with the learner's contraction.
    StoGradOracle oracle_a(problem, sigma, RngStream(master_seed, "oracle"));
    RngStream mix_a(master_seed, "mix");
    ConversionTrace conv = run_conversion(problem, oracle_a, make_learner(params.omd(), problem.dim),
                                          StrategyConfig{Strategy::OptionIII, zeta}, T, x0, mix_a,
                                          /*record_loss=*/false);

    // Schedule-free side under identical streams.
    StoGradOracle oracle_b(problem, sigma, RngStream(master_seed, "oracle"));
    RngStream mix_b(master_seed, "mix");
    SfTrace sf = run_sf_sgd(problem, oracle_b, SfSgdConfig::from_params(params), T, x0, mix_b);

    EquivalenceReport rep;
    rep.rounds = T;
    Vec z_sf = x0;  // z_t entering round t; z_1 = x_0
    for (std::size_t t = 1; t <= T; ++t) {
        const TraceStep& cs = conv.at(t);
        const SfStepRecord& ss = sf.at(t);
        const double scale = 1.0 + norm(cs.x);
        const Vec z_conv = extrapolate_z(cs.x, cs.delta, zeta);
        rep.max_rel_x = std::max(rep.max_rel_x, norm(sub(cs.x, ss.x)) / scale);
        rep.max_rel_y = std::max(rep.max_rel_y, norm(sub(cs.y, ss.y)) / scale);
        rep.max_rel_z = std::max(rep.max_rel_z, norm(sub(z_conv, z_sf)) / scale);
        z_sf = ss.z_next;
    }
    rep.pass = rep.max_rel_x < tol && rep.max_rel_y < tol && rep.max_rel_z < tol;
    return rep;
}

}  // namespace o2nc
