#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "o2nc/conversion.hpp"
#include "o2nc/problem.hpp"
#include "o2nc/rng.hpp"
#include "o2nc/vec.hpp"

namespace o2nc {

/// Constants derived from the target accuracy.  With
/// alpha = (epsilon / (7 (G + sigma)))^2 and
/// K = 1 + (49 (G + sigma)^2 / epsilon^2) sqrt(C_x):
///
///   beta_star = 1 - alpha
///   d_star    = (1/4) lambda^{-1/2} epsilon^{1/2} / K
///   mu_star   = 2 lambda^{1/2} epsilon^{1/2} K
///   eta_star  = (2 / (G + sigma)) d_star sqrt(1 - beta_star)
///   zeta_star = beta_star / (1 + eta_star mu_star)
///   gamma     = eta_star / (1 - zeta_star)
///
/// t_min is the smallest horizon the guarantees cover:
/// 49 (G + sigma)^2 / epsilon^2, raised to
/// 980 (G + sigma)^2 delta_f lambda^{1/2} epsilon^{-7/2} when the initial
/// optimality gap delta_f is supplied.
struct ParamSet {
    // inputs
    double epsilon = 0.0;
    double lambda = 0.0;
    double G = 0.0;
    double sigma = 0.0;
    double c_x_bound = 0.0;
    std::optional<double> delta_f;

    // derived
    double beta_star = 0.0;
    double d_star = 0.0;
    double mu_star = 0.0;
    double eta_star = 0.0;
    double zeta_star = 0.0;
    double gamma = 0.0;
    long long t_min = 0;

    OmdParams omd() const { return OmdParams{eta_star, mu_star, beta_star}; }
};

/// Requires epsilon <= (7/2)(G + sigma) (RegimeError otherwise), and
/// positive epsilon, lambda, G + sigma, nonnegative sigma and c_x_bound.
ParamSet derive_params(double epsilon, double lambda, double G, double sigma,
                       double c_x_bound, std::optional<double> delta_f = std::nullopt);

/// Schedule-free SGD
///   x_t     = (1 - c) x_{t-1} + c z_t
///   y_t     = kappa_t x_t + (1 - kappa_t) z_t,  kappa_t ~ Unif[kappa_lo, kappa_hi]
///   z_{t+1} = z_t - gamma g_t,                  g_t from the oracle at y_t
///
/// The tuned instantiation has c = 1 - zeta, kappa ~ Unif[zeta, 1] and
/// gamma = eta / (1 - zeta); from_params builds exactly that.  Arbitrary
/// (gamma, c, kappa law) configurations are accepted for exploratory runs.
struct SfSgdConfig {
    double gamma = 0.0;
    double c = 0.0;
    double kappa_lo = 0.0;
    double kappa_hi = 1.0;

    static SfSgdConfig from_params(const ParamSet& p);
};

struct SfSgdState {
    Vec x;  // x_{t-1} going into the next step
    Vec z;  // z_t
};

inline SfSgdState make_sf_state(const Vec& x0) { return SfSgdState{x0, x0}; }

struct SfStepRecord {
    Vec x, y, z_next, g;
    double kappa = 0.0;
};

/// Advances the state by one step and reports the step's internals.
/// kappa is sampled as kappa_hi - u (kappa_hi - kappa_lo) with
/// u = kappa_stream.next_uniform(), so a stream shared with a conversion
/// run couples kappa_t = 1 - s_t (1 - zeta) pathwise.
SfStepRecord sf_sgd_step(SfSgdState& state, const SfSgdConfig& cfg, StoGradOracle& oracle,
                         RngStream& kappa_stream);

struct SfTrace {
    Vec x0;
    std::vector<SfStepRecord> steps;  // steps[t-1] holds round t
    std::size_t rounds() const { return steps.size(); }
    const SfStepRecord& at(std::size_t t) const { return steps.at(t - 1); }
};

SfTrace run_sf_sgd(const Problem& problem, StoGradOracle& oracle, const SfSgdConfig& cfg,
                   std::size_t T, const Vec& x0, RngStream& kappa_stream);

/// z_t = x_t + Delta_t / (1 - zeta), the extrapolated iterate that turns
/// the incremental anchor recursion into plain SGD steps.
Vec extrapolate_z(const Vec& x, const Vec& delta, double zeta);

/// Pathwise comparison of an OPTION_III conversion run against the
/// schedule-free form under shared noise and mixing streams.
struct EquivalenceReport {
    std::size_t rounds = 0;
    double max_rel_x = 0.0;
    double max_rel_y = 0.0;
    double max_rel_z = 0.0;
    bool pass = false;
};

/// Runs both algorithms for T rounds from x0 with streams derived from
/// master_seed and compares x_t, y_t and the extrapolated z_t step by
/// step.  Discrepancies are measured relative to 1 + ||x_t||; pass means
/// every one stays below tol.
EquivalenceReport verify_equivalence(const Problem& problem, double sigma, const ParamSet& params,
                                     std::size_t T, const Vec& x0, std::uint64_t master_seed,
                                     double tol = 1e-8);

}  // namespace o2nc
