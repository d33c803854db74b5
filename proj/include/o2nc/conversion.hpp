#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "o2nc/omd.hpp"
#include "o2nc/problem.hpp"
#include "o2nc/rng.hpp"
#include "o2nc/vec.hpp"

namespace o2nc {

/// Choice of the anchor sequence x_t in the conversion loop:
///   OPTION_I    x_t = w_{t-1}           (incremental, C_x <= 1)
///   OPTION_II   x_t = x_0               (frozen anchor, C_x = 0)
///   OPTION_III  x_t = x_{t-1} + Delta_t / zeta   (C_x = 1 / zeta^2)
enum class Strategy { OptionI, OptionII, OptionIII };

std::string strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

struct StrategyConfig {
    Strategy kind = Strategy::OptionI;
    // Required for OPTION_III and must equal the learner's own
    // zeta = beta / (1 + eta mu) exactly; the division by zeta in the
    // anchor update has to use the same constant the learner contracts by.
    double zeta = 0.0;
};

struct TraceStep {
    Vec x, w, y, delta, g;
    double s = 0.0;  // the Unif[0,1] mixing draw for y_t (kappa mapped back for SF runs)
    double f_x = 0.0, f_w = 0.0, f_y = 0.0;
};

struct ConversionTrace {
    Vec x0;
    std::vector<TraceStep> steps;  // steps[t-1] holds round t
    bool has_loss_values = false;

    std::size_t rounds() const { return steps.size(); }
    const TraceStep& at(std::size_t t) const { return steps.at(t - 1); }  // 1-based
};

/// Runs T rounds of the conversion loop: receive Delta_t, place the
/// anchor x_t per the strategy, set w_t = x_t + Delta_t, probe
/// y_t = x_t + s_t Delta_t with s_t ~ Unif[0,1], query the oracle at y_t
/// and feed <g_t, .> + (mu/2)||.||^2 back to the learner.
///
/// Preconditions: learner.delta == 0 and, for OPTION_III,
/// cfg.zeta == omd_zeta(learner.params) bitwise.  Non-finite iterates
/// raise DivergenceError with the offending step.
ConversionTrace run_conversion(const Problem& problem, StoGradOracle& oracle,
                               LearnerState learner, const StrategyConfig& cfg,
                               std::size_t T, const Vec& x0, RngStream& s_stream,
                               bool record_loss = true);

struct AnchoredEpoch {
    Vec anchor;  // x_0 of this epoch
    std::size_t picked_index = 0;  // 1-based index of the w_t promoted to the next anchor
    ConversionTrace trace;
};

/// Restarted OPTION_II: epoch n runs T rounds frozen at anchor a_n with a
/// freshly zeroed learner, then promotes a uniformly drawn w_t to a_{n+1}.
std::vector<AnchoredEpoch> run_anchoring(const Problem& problem, StoGradOracle& oracle,
                                         const OmdParams& params, std::size_t epochs,
                                         std::size_t T, const Vec& x0, RngStream& s_stream,
                                         RngStream& anchor_stream, bool record_loss = true);

/// Measured stability factor: sum_t ||x_t - x_{t-1}||^2 / sum_t ||Delta_t||^2,
/// with x_0 taken from the trace; 0 when the denominator is 0.
double stability_factor(const ConversionTrace& trace);

/// Comparator directions used by the certificate bound machinery:
///   u_t = -D * S_t / ||S_t||,  S_t = sum_{s<=t} beta^{t-s} grad F(y_s).
/// When ||S_t|| < 1e-12 the comparator degenerates to the zero vector and
/// is flagged.
struct ComparatorSequence {
    std::vector<Vec> u;                // u[t-1] is u_t
    std::vector<std::uint8_t> degenerate;
};
ComparatorSequence comparator_sequence(const std::vector<Vec>& ys, const Problem& problem,
                                       double beta, double D);
ComparatorSequence comparator_sequence(const ConversionTrace& trace, const Problem& problem,
                                       double beta, double D);

/// sum_t (F(x_t) - F(w_t)); requires the trace to carry loss values.
double loss_decrement_sum(const ConversionTrace& trace);

}  // namespace o2nc
