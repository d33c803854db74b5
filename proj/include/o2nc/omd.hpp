#pragma once

#include <cstddef>
#include <vector>

#include "o2nc/vec.hpp"

namespace o2nc {

/// Discounted online mirror descent on the regularized linear losses
/// l_t(v) = <g_t, v> + (mu / 2) ||v||^2 with discount factor beta.
///
/// The update is Delta' = zeta * (Delta - eta * g) with
/// zeta = beta / (1 + eta * mu).  zeta is always recomputed from
/// (eta, mu, beta); it is never stored, so the three base constants stay
/// the single source of truth.
struct OmdParams {
    double eta = 0.0;
    double mu = 0.0;
    double beta = 0.0;
};

inline double omd_zeta(const OmdParams& p) { return p.beta / (1.0 + p.eta * p.mu); }

struct LearnerState {
    OmdParams params;
    Vec delta;  // the prediction Delta_t handed to the conversion loop
};

inline LearnerState make_learner(const OmdParams& p, std::size_t dim) {
    return LearnerState{p, zeros(dim)};
}

/// One OMD step on gradient g.
LearnerState omd_step(const LearnerState& state, const Vec& g);

/// Record of the loss sequence fed to a learner, sufficient to evaluate
/// discounted regret against any comparator after the fact.
class RegretLedger {
public:
    RegretLedger(double beta, double mu) : beta_(beta), mu_(mu) {}

    void record(const Vec& g, const Vec& delta);

    std::size_t rounds() const { return gs_.size(); }
    double beta() const { return beta_; }
    double mu() const { return mu_; }
    const Vec& g_at(std::size_t t) const { return gs_.at(t - 1); }          // 1-based
    const Vec& delta_at(std::size_t t) const { return deltas_.at(t - 1); }  // 1-based

    /// Discounted regret against comparator u after t rounds:
    ///   sum_{s=1..t} beta^{t-s} (l_s(Delta_s) - l_s(u)),
    /// evaluated in a single pass with running discounting (no pow).
    /// Throws std::out_of_range when t exceeds the recorded rounds.
    double discounted_regret(const Vec& u, std::size_t t) const;

private:
    double beta_;
    double mu_;
    std::vector<Vec> gs_;
    std::vector<Vec> deltas_;
};

/// Regret bound for the tuned learner:
///   2 ||u|| (G + sigma) / (beta sqrt(1 - beta)) + (mu / 2) ||u||^2.
double regret_bound_rhs(double u_norm, double G, double sigma, double beta, double mu);

/// Step size that optimizes the bound: (2 / (G + sigma)) ||u|| sqrt(1 - beta).
double tuned_eta(double u_norm, double G, double sigma, double beta);

}  // namespace o2nc
