#include "o2nc/analysis.hpp"

#include <cmath>

#include "o2nc/errors.hpp"

namespace o2nc {

double lambda_bruteforce(double beta, std::size_t n, std::size_t t) {
    if (n == 0 || t == 0 || t > n) throw std::out_of_range("lambda_{n,t} needs 1 <= t <= n");
    const std::vector<double> q = q_weights(beta, n);
    double acc = 0.0;
    for (std::size_t i = t; i <= n; ++i)
        for (std::size_t j = 1; j + 1 <= t; ++j)
            acc += q[i - 1] * q[j - 1] * static_cast<double>(i - j);
    return acc;
}

double lambda_closed_form(double beta, std::size_t n, std::size_t t) {
    if (n == 0 || t == 0 || t > n) throw std::out_of_range("lambda_{n,t} needs 1 <= t <= n");
    const double a = static_cast<double>(n - t + 1);
    const double b = static_cast<double>(n);
    const double beta_a = std::pow(beta, a);
    const double beta_b = std::pow(beta, b);
    const double denom = one_minus_beta_pow(beta, n);
    return (a * beta_a * one_minus_beta_pow(beta, n) - b * beta_b * one_minus_beta_pow(beta, n - t + 1)) /
           (denom * denom);
}

double lambda_upper_bound(double beta, std::size_t n, std::size_t t) {
    if (n == 0 || t == 0 || t > n) throw std::out_of_range("lambda_{n,t} needs 1 <= t <= n");
    const double a = static_cast<double>(n - t + 1);
    return a * std::pow(beta, a) / one_minus_beta_pow(beta, n);
}

LambdaGridReport lambda_bound_check(const std::vector<double>& betas, std::size_t n_max,
                                    double rel_tol) {
    LambdaGridReport rep;
    rep.closed_form_ok = true;
    rep.bound_ok = true;
    for (double beta : betas) {
        for (std::size_t n = 1; n <= n_max; ++n) {
            // One q array per (beta, n); the literal double loop runs on top.
            const std::vector<double> q = q_weights(beta, n);
            for (std::size_t t = 1; t <= n; ++t) {
                double brute = 0.0;
                for (std::size_t i = t; i <= n; ++i)
                    for (std::size_t j = 1; j + 1 <= t; ++j)
                        brute += q[i - 1] * q[j - 1] * static_cast<double>(i - j);

                const double closed = lambda_closed_form(beta, n, t);
                const double bound = lambda_upper_bound(beta, n, t);
                ++rep.cells;

                const double dev = std::fabs(brute - closed) / std::max(std::fabs(closed), 1e-300);
                if (t == 1) {
                    // empty sum; the closed form must vanish identically
                    if (std::fabs(closed) > 1e-14 || brute != 0.0) rep.closed_form_ok = false;
                } else {
                    rep.max_rel_dev = std::max(rep.max_rel_dev, dev);
                    if (dev > rel_tol) rep.closed_form_ok = false;
                }
                const double ratio = brute / std::max(bound, 1e-300);
                rep.max_bound_ratio = std::max(rep.max_bound_ratio, ratio);
                if (brute > bound * (1.0 + 1e-12)) rep.bound_ok = false;
            }
        }
    }
    rep.pass = rep.closed_form_ok && rep.bound_ok;
    return rep;
}

VarianceDecomposition variance_decomposition_check(const std::vector<Vec>& xs,
                                                   const std::vector<Vec>& ys, double beta,
                                                   std::size_t t) {
    if (t == 0 || t > xs.size() || t > ys.size())
        throw std::out_of_range("variance decomposition horizon outside the recorded range");
    const std::vector<double> q = q_weights(beta, t);
    const Vec ybar = ema(ys, beta, t);
    const Vec xbar = ema(xs, beta, t);

    VarianceDecomposition r;
    double cross = 0.0;
    for (std::size_t s = 1; s <= t; ++s) {
        r.lhs += q[s - 1] * sq_dist(ys[s - 1], ybar);
        r.rhs += 2.0 * q[s - 1] * sq_dist(xs[s - 1], xbar);
        cross += 2.0 * q[s - 1] * sq_dist(ys[s - 1], xs[s - 1]);
    }
    r.rhs += cross;
    r.holds = r.lhs <= r.rhs + 1e-12 * (1.0 + r.lhs + r.rhs);
    return r;
}

BoundReport assemble_certificate_bound(const ConversionTrace& trace, const Problem& problem,
                                       double beta, double mu, double D, double lambda,
                                       double sigma, double c_x_bound) {
    const std::size_t T = trace.rounds();
    if (T == 0) throw ConfigError("cannot assemble the bound on an empty trace");
    if (!trace.has_loss_values)
        throw ConfigError("assembling the bound needs a trace recorded with loss values");
    if (!(D > 0.0)) throw ConfigError("comparator radius D must be positive");

    const double om_beta = 1.0 - beta;
    const double threshold = 8.0 * lambda * D * (1.0 + c_x_bound / (om_beta * om_beta));
    if (mu * (1.0 + 1e-9) < threshold)
        throw RegimeError("bound precondition violated: mu >= 8 lambda D (1 + c_x (1-beta)^-2) "
                          "requires mu >= " + std::to_string(threshold) + ", got " +
                          std::to_string(mu));

    BoundReport rep;
    const std::size_t dim = problem.dim;

    // Streaming pass over t for the per-round comparator regrets:
    //   Regret_t(u_t) = A_t - <G_t, u_t> - (mu/2) ||u_t||^2 W_t
    // with A_t the discounted sum of l_s(Delta_s), G_t the discounted
    // stochastic-gradient sum and W_t the discounted weight mass.
    Vec S = zeros(dim);   // discounted true gradients, defines u_t
    Vec Gd = zeros(dim);  // discounted stochastic gradients
    double A = 0.0;
    double W = 0.0;
    double running = 0.0;
    double terminal = 0.0;
    for (std::size_t t = 1; t <= T; ++t) {
        const TraceStep& st = trace.at(t);
        const Vec grad = problem.gradient_at(st.y);
        A = beta * A + dot(st.g, st.delta) + 0.5 * mu * sq_norm(st.delta);
        W = beta * W + 1.0;
        for (std::size_t i = 0; i < dim; ++i) {
            S[i] = beta * S[i] + grad[i];
            Gd[i] = beta * Gd[i] + st.g[i];
        }
        const double Sn = norm(S);
        double regret_t;
        if (Sn < 1e-12) {
            ++rep.degenerate_comparators;
            regret_t = A;  // u_t = 0 contributes no comparator loss
        } else {
            // u_t = -D S_t / ||S_t||
            regret_t = A + (D / Sn) * dot(Gd, S) - 0.5 * mu * D * D * W;
        }
        running += regret_t;
        if (t == T) terminal = regret_t;
    }

    const double DT = D * static_cast<double>(T);
    rep.regret_terminal = terminal;
    rep.regret_running_sum = running;
    rep.regret_term = (beta * terminal + om_beta * running) / DT;
    rep.decrement_sum = loss_decrement_sum(trace);
    rep.decrement_term = rep.decrement_sum / DT;
    rep.mu_term = 0.5 * mu * D;
    rep.sigma_term_slow = sigma / (static_cast<double>(T) * std::sqrt(om_beta));
    rep.sigma_term_fast = sigma * std::sqrt(om_beta);
    rep.rhs = rep.regret_term + rep.decrement_term + rep.mu_term + rep.sigma_term_slow +
              rep.sigma_term_fast;

    std::vector<Vec> ys;
    ys.reserve(T);
    for (const TraceStep& st : trace.steps) ys.push_back(st.y);
    rep.lhs = expected_certificate(ys, problem, beta, lambda);
    rep.slack = rep.rhs - rep.lhs;
    return rep;
}

CxRow cx_row(Strategy kind, const ConversionTrace& trace, double zeta) {
    CxRow row;
    row.strategy = strategy_name(kind);
    row.measured = stability_factor(trace);
    switch (kind) {
        case Strategy::OptionI:
            row.bound = 1.0;
            row.pass = row.measured <= 1.0 + 1e-12;
            break;
        case Strategy::OptionII:
            row.bound = 0.0;
            row.pass = row.measured == 0.0;
            break;
        case Strategy::OptionIII: {
            row.bound = 1.0 / (zeta * zeta);
            row.pass = std::fabs(row.measured - row.bound) <= 1e-10 * row.bound && row.bound <= 16.0;
            break;
        }
    }
    return row;
}

}  // namespace o2nc
