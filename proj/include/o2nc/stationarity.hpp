#pragma once

#include <cstddef>
#include <vector>

#include "o2nc/problem.hpp"
#include "o2nc/rng.hpp"
#include "o2nc/vec.hpp"

namespace o2nc {

/// 1 - beta^t evaluated as -expm1(t log beta); exact down to the last few
/// ulps even when beta^t underflows.
double one_minus_beta_pow(double beta, std::size_t t);

/// q_{t,s} = beta^{t-s} (1 - beta) / (1 - beta^t) for 1 <= s <= t.
/// The weights sum to 1.
std::vector<double> q_weights(double beta, std::size_t t);

/// Streaming exponential moving average with the bias-corrected
/// normalizer:  ybar_t = (1 - beta) / (1 - beta^t) * sum_s beta^{t-s} y_s.
class EmaAccumulator {
public:
    EmaAccumulator(double beta, std::size_t dim) : beta_(beta), weighted_sum_(zeros(dim)) {}

    void push(const Vec& y);
    std::size_t count() const { return count_; }
    Vec value() const;  // std::out_of_range before the first push

private:
    double beta_;
    Vec weighted_sum_;
    std::size_t count_ = 0;
};

/// Batch EMA of y_1..y_t from a sequence of iterates (1-based t).
Vec ema(const std::vector<Vec>& ys, double beta, std::size_t t);

/// Law of the reported index tau on {1..T}:
///   P(tau = t) = (1 - beta^t) / T            for t < T,
///   P(tau = T) = (1 - beta^T) / ((1 - beta) T).
/// The masses sum to 1 by a telescoping identity.
class IndexLaw {
public:
    IndexLaw(double beta, std::size_t T);

    std::size_t T() const { return p_.size(); }
    double p(std::size_t t) const { return p_.at(t - 1); }  // 1-based
    const std::vector<double>& probabilities() const { return p_; }
    double total_mass() const { return cdf_.back(); }

    /// Inverse-CDF draw consuming exactly one uniform from the stream.
    std::size_t sample(RngStream& stream) const;

private:
    std::vector<double> p_;
    std::vector<double> cdf_;
};

/// Certificate of approximate stationarity at averaging horizon t:
///   || sum_s q_{t,s} grad F(y_s) ||  +  lambda sum_s q_{t,s} ||y_s - ybar_t||^2.
/// This upper-bounds the Goldstein-style norm || grad F(ybar_t) ||_lambda
/// evaluated through the averaged gradients; it is the quantity the
/// convergence bounds control.
///
/// `grads` may carry precomputed true gradients grad F(y_s) (1-based,
/// at least t entries); pass nullptr to have them queried on the fly.
double stationarity_certificate(const std::vector<Vec>& ys, const Problem& problem, double beta,
                                double lambda, std::size_t t, const std::vector<Vec>* grads = nullptr);

/// Exact expectation of the certificate under the index law:
///   sum_t P(tau = t) * certificate(t),
/// computed over every t in 1..T (no sampling).  Gradients are evaluated
/// once per iterate and reused.
double expected_certificate(const std::vector<Vec>& ys, const Problem& problem, double beta,
                            double lambda);

/// As above but restricted to the first T rounds of ys.
double expected_certificate_prefix(const std::vector<Vec>& ys, const Problem& problem, double beta,
                                   double lambda, std::size_t T);

/// For an L-smooth problem, a point with certificate value <= epsilon at
/// lambda = L^2 / epsilon must satisfy ||grad F(point)|| <= 2 epsilon.
/// Returns that verdict; ConfigError when the problem records no L.
bool smooth_reduction_check(const Problem& problem, const Vec& point, double epsilon);

}  // namespace o2nc
