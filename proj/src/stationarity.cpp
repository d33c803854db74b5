#include "o2nc/stationarity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "o2nc/errors.hpp"

namespace o2nc {

double one_minus_beta_pow(double beta, std::size_t t) {
    if (beta <= 0.0 || beta >= 1.0)
        throw ConfigError("discount beta must lie in (0, 1), got " + std::to_string(beta));
    return -std::expm1(static_cast<double>(t) * std::log(beta));
}

std::vector<double> q_weights(double beta, std::size_t t) {
    if (t == 0) throw std::out_of_range("q_weights needs t >= 1");
    const double norm = (1.0 - beta) / one_minus_beta_pow(beta, t);
    std::vector<double> q(t);
    double pw = 1.0;  // beta^{t-s} walking s = t down to 1
    for (std::size_t s = t; s >= 1; --s) {
        q[s - 1] = pw * norm;
        pw *= beta;
    }
    return q;
}

void EmaAccumulator::push(const Vec& y) {
    if (y.size() != weighted_sum_.size())
        throw ConfigError("EMA dimension mismatch");
    for (std::size_t i = 0; i < y.size(); ++i)
        weighted_sum_[i] = beta_ * weighted_sum_[i] + y[i];
    ++count_;
}

Vec EmaAccumulator::value() const {
    if (count_ == 0) throw std::out_of_range("EMA queried before any iterate was pushed");
    return scaled(weighted_sum_, (1.0 - beta_) / one_minus_beta_pow(beta_, count_));
}

Vec ema(const std::vector<Vec>& ys, double beta, std::size_t t) {
    if (t == 0 || t > ys.size())
        throw std::out_of_range("ema: horizon " + std::to_string(t) + " outside the recorded 1.." +
                                std::to_string(ys.size()));
    Vec acc = zeros(ys[0].size());
    for (std::size_t s = 1; s <= t; ++s)
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] = beta * acc[i] + ys[s - 1][i];
    return scaled(acc, (1.0 - beta) / one_minus_beta_pow(beta, t));
}

IndexLaw::IndexLaw(double beta, std::size_t T) {
    if (T == 0) throw ConfigError("index law needs a positive horizon");
    (void)one_minus_beta_pow(beta, 1);  // validates beta
    p_.resize(T);
    cdf_.resize(T);
    const double Td = static_cast<double>(T);
    double acc = 0.0;
    for (std::size_t t = 1; t <= T; ++t) {
        double mass = one_minus_beta_pow(beta, t) / Td;
        if (t == T) mass /= 1.0 - beta;
        p_[t - 1] = mass;
        acc += mass;
        cdf_[t - 1] = acc;
    }
}

std::size_t IndexLaw::sample(RngStream& stream) const {
    const double u = stream.next_uniform() * cdf_.back();
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    std::size_t idx = static_cast<std::size_t>(it - cdf_.begin());
    if (idx >= p_.size()) idx = p_.size() - 1;
    return idx + 1;
}

namespace {

// Shared core: needs the discounted gradient sum S_t, the EMA ybar_t and
// the q weights for horizon t.
double certificate_at(const std::vector<Vec>& ys, const std::vector<Vec>& grads, double beta,
                      double lambda, std::size_t t) {
    const std::size_t dim = ys[0].size();
    Vec S = zeros(dim);
    Vec Ysum = zeros(dim);
    for (std::size_t s = 1; s <= t; ++s) {
        for (std::size_t i = 0; i < dim; ++i) {
            S[i] = beta * S[i] + grads[s - 1][i];
            Ysum[i] = beta * Ysum[i] + ys[s - 1][i];
        }
    }
    const double qnorm = (1.0 - beta) / one_minus_beta_pow(beta, t);
    const Vec ybar = scaled(Ysum, qnorm);

    double spread = 0.0;
    double pw = 1.0;  // beta^{t-s}, s = t down to 1
    for (std::size_t s = t; s >= 1; --s) {
        spread += pw * sq_dist(ys[s - 1], ybar);
        pw *= beta;
    }
    return qnorm * norm(S) + lambda * qnorm * spread;
}

std::vector<Vec> true_gradients(const std::vector<Vec>& ys, const Problem& problem, std::size_t t) {
    std::vector<Vec> grads;
    grads.reserve(t);
    for (std::size_t s = 0; s < t; ++s) grads.push_back(problem.gradient_at(ys[s]));
    return grads;
}

}  // namespace

double stationarity_certificate(const std::vector<Vec>& ys, const Problem& problem, double beta,
                                double lambda, std::size_t t, const std::vector<Vec>* grads) {
    if (t == 0 || t > ys.size())
        throw std::out_of_range("certificate horizon " + std::to_string(t) +
                                " outside the recorded 1.." + std::to_string(ys.size()));
    if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
    if (grads) {
        if (grads->size() < t) throw ConfigError("precomputed gradients cover fewer than t iterates");
        return certificate_at(ys, *grads, beta, lambda, t);
    }
    return certificate_at(ys, true_gradients(ys, problem, t), beta, lambda, t);
}

double expected_certificate_prefix(const std::vector<Vec>& ys, const Problem& problem, double beta,
                                   double lambda, std::size_t T) {
    if (T == 0 || T > ys.size())
        throw std::out_of_range("expected certificate horizon outside the recorded range");
    const std::size_t dim = ys[0].size();
    const std::vector<Vec> grads = true_gradients(ys, problem, T);
    const IndexLaw law(beta, T);

    // One left-to-right sweep keeps the discounted sums S_t and Ysum_t
    // streaming; only the spread term needs the inner pass over s.
    Vec S = zeros(dim);
    Vec Ysum = zeros(dim);
    double acc = 0.0;
    for (std::size_t t = 1; t <= T; ++t) {
        for (std::size_t i = 0; i < dim; ++i) {
            S[i] = beta * S[i] + grads[t - 1][i];
            Ysum[i] = beta * Ysum[i] + ys[t - 1][i];
        }
        const double qnorm = (1.0 - beta) / one_minus_beta_pow(beta, t);
        const Vec ybar = scaled(Ysum, qnorm);
        double spread = 0.0;
        double pw = 1.0;
        for (std::size_t s = t; s >= 1; --s) {
            spread += pw * sq_dist(ys[s - 1], ybar);
            pw *= beta;
        }
        acc += law.p(t) * (qnorm * norm(S) + lambda * qnorm * spread);
    }
    return acc;
}

double expected_certificate(const std::vector<Vec>& ys, const Problem& problem, double beta,
                            double lambda) {
    return expected_certificate_prefix(ys, problem, beta, lambda, ys.size());
}

bool smooth_reduction_check(const Problem& problem, const Vec& point, double epsilon) {
    if (!problem.smoothness_L)
        throw ConfigError("smooth_reduction_check needs a problem with a recorded smoothness L");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
    return norm(problem.gradient_at(point)) <= 2.0 * epsilon;
}

}  // namespace o2nc
