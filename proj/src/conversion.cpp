#include "o2nc/conversion.hpp"

#include <cmath>

#include "o2nc/errors.hpp"

namespace o2nc {

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::OptionI: return "OPTION_I";
        case Strategy::OptionII: return "OPTION_II";
        case Strategy::OptionIII: return "OPTION_III";
    }
    return "?";
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "OPTION_I") return Strategy::OptionI;
    if (name == "OPTION_II") return Strategy::OptionII;
    if (name == "OPTION_III") return Strategy::OptionIII;
    throw ConfigError("unknown strategy '" + name + "'");
}

namespace {

void check_finite(const Vec& v, const char* what, std::size_t t) {
    if (!all_finite(v))
        throw DivergenceError(std::string(what) + " became non-finite", static_cast<long long>(t));
}

}  // namespace

ConversionTrace run_conversion(const Problem& problem, StoGradOracle& oracle,
                               LearnerState learner, const StrategyConfig& cfg,
                               std::size_t T, const Vec& x0, RngStream& s_stream,
                               bool record_loss) {
    if (x0.size() != problem.dim) throw ConfigError("x0 dimension does not match the problem");
    if (learner.delta.size() != problem.dim)
        throw ConfigError("learner dimension does not match the problem");
    if (sq_norm(learner.delta) != 0.0)
        throw ConfigError("the learner must start from Delta = 0");
    if (cfg.kind == Strategy::OptionIII && cfg.zeta != omd_zeta(learner.params))
        throw ConfigError("OPTION_III requires cfg.zeta equal to the learner's zeta exactly");

    ConversionTrace trace;
    trace.x0 = x0;
    trace.has_loss_values = record_loss;
    trace.steps.reserve(T);

    Vec x_prev = x0;  // x_{t-1}; x_0 coincides with w_0 for OPTION_I
    Vec w_prev = x0;
    for (std::size_t t = 1; t <= T; ++t) {
        TraceStep step;
        step.delta = learner.delta;

        switch (cfg.kind) {
            case Strategy::OptionI: step.x = w_prev; break;
            case Strategy::OptionII: step.x = x0; break;
            case Strategy::OptionIII: step.x = axpy(x_prev, 1.0 / cfg.zeta, step.delta); break;
        }
        step.w = add(step.x, step.delta);
        step.s = s_stream.next_uniform();
        step.y = axpy(step.x, step.s, step.delta);
        check_finite(step.x, "anchor x", t);
        check_finite(step.w, "candidate w", t);

        step.g = oracle.sample(step.y);
        check_finite(step.g, "oracle gradient", t);

        if (record_loss) {
            step.f_x = problem.evaluate(step.x);
            step.f_w = problem.evaluate(step.w);
            step.f_y = problem.evaluate(step.y);
        }

        learner = omd_step(learner, step.g);
        x_prev = step.x;
        w_prev = step.w;
        trace.steps.push_back(std::move(step));
    }
    return trace;
}

std::vector<AnchoredEpoch> run_anchoring(const Problem& problem, StoGradOracle& oracle,
                                         const OmdParams& params, std::size_t epochs,
                                         std::size_t T, const Vec& x0, RngStream& s_stream,
                                         RngStream& anchor_stream, bool record_loss) {
    if (epochs == 0) throw ConfigError("anchoring needs at least one epoch");
    std::vector<AnchoredEpoch> out;
    out.reserve(epochs);
    Vec anchor = x0;
    StrategyConfig frozen{Strategy::OptionII, 0.0};
    for (std::size_t n = 0; n < epochs; ++n) {
        AnchoredEpoch epoch;
        epoch.anchor = anchor;
        epoch.trace = run_conversion(problem, oracle, make_learner(params, problem.dim), frozen, T,
                                     anchor, s_stream, record_loss);
        // uniform pick of the next anchor among this epoch's candidates
        std::size_t pick = 1 + static_cast<std::size_t>(anchor_stream.next_uniform() *
                                                        static_cast<double>(T));
        if (pick > T) pick = T;
        epoch.picked_index = pick;
        anchor = epoch.trace.at(pick).w;
        out.push_back(std::move(epoch));
    }
    return out;
}

double stability_factor(const ConversionTrace& trace) {
    double num = 0.0;
    double den = 0.0;
    const Vec* prev = &trace.x0;
    for (const TraceStep& step : trace.steps) {
        num += sq_dist(step.x, *prev);
        den += sq_norm(step.delta);
        prev = &step.x;
    }
    return den == 0.0 ? 0.0 : num / den;
}

ComparatorSequence comparator_sequence(const std::vector<Vec>& ys, const Problem& problem,
                                       double beta, double D) {
    ComparatorSequence seq;
    const std::size_t T = ys.size();
    seq.u.reserve(T);
    seq.degenerate.reserve(T);
    Vec S = zeros(problem.dim);  // discounted true-gradient sum
    for (std::size_t t = 1; t <= T; ++t) {
        const Vec grad = problem.gradient_at(ys[t - 1]);
        for (std::size_t i = 0; i < S.size(); ++i) S[i] = beta * S[i] + grad[i];
        const double Sn = norm(S);
        if (Sn < 1e-12) {
            seq.u.push_back(zeros(problem.dim));
            seq.degenerate.push_back(1);
        } else {
            seq.u.push_back(scaled(S, -D / Sn));
            seq.degenerate.push_back(0);
        }
    }
    return seq;
}

ComparatorSequence comparator_sequence(const ConversionTrace& trace, const Problem& problem,
                                       double beta, double D) {
    std::vector<Vec> ys;
    ys.reserve(trace.rounds());
    for (const TraceStep& step : trace.steps) ys.push_back(step.y);
    return comparator_sequence(ys, problem, beta, D);
}

double loss_decrement_sum(const ConversionTrace& trace) {
    if (!trace.has_loss_values)
        throw ConfigError("loss_decrement_sum needs a trace recorded with loss values");
    double s = 0.0;
    for (const TraceStep& step : trace.steps) s += step.f_x - step.f_w;
    return s;
}

}  // namespace o2nc
