#include "o2nc/omd.hpp"

#include <cmath>
#include <stdexcept>

#include "o2nc/errors.hpp"

namespace o2nc {

LearnerState omd_step(const LearnerState& state, const Vec& g) {
    if (g.size() != state.delta.size())
        throw ConfigError("gradient dimension does not match the learner state");
    const double zeta = omd_zeta(state.params);
    LearnerState next = state;
    for (std::size_t i = 0; i < g.size(); ++i)
        next.delta[i] = zeta * (state.delta[i] - state.params.eta * g[i]);
    return next;
}

void RegretLedger::record(const Vec& g, const Vec& delta) {
    gs_.push_back(g);
    deltas_.push_back(delta);
}

double RegretLedger::discounted_regret(const Vec& u, std::size_t t) const {
    if (t == 0 || t > gs_.size())
        throw std::out_of_range("discounted_regret: round " + std::to_string(t) +
                                " outside the recorded 1.." + std::to_string(gs_.size()));
    const double half_mu = 0.5 * mu_;
    const double u_part = -dot(u, u) * half_mu;  // -(mu/2)||u||^2, reused each round
    double acc = 0.0;
    for (std::size_t s = 1; s <= t; ++s) {
        const Vec& g = gs_[s - 1];
        const Vec& d = deltas_[s - 1];
        const double round = dot(g, d) + half_mu * dot(d, d) - dot(g, u) + u_part;
        acc = beta_ * acc + round;
    }
    return acc;
}

double regret_bound_rhs(double u_norm, double G, double sigma, double beta, double mu) {
    return 2.0 * u_norm * (G + sigma) / (beta * std::sqrt(1.0 - beta)) + 0.5 * mu * u_norm * u_norm;
}

double tuned_eta(double u_norm, double G, double sigma, double beta) {
    return 2.0 / (G + sigma) * u_norm * std::sqrt(1.0 - beta);
}

}  // namespace o2nc
