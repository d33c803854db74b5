#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "o2nc/conversion.hpp"
#include "o2nc/schedule_free.hpp"
#include "o2nc/stationarity.hpp"

namespace o2nc {

/// Brute-force evaluation of the lag coefficient
///   lambda_{n,t} = sum_{i=t..n} sum_{j=1..t-1} q_{n,i} q_{n,j} (i - j)
/// by the literal double loop (empty sum for t = 1).
double lambda_bruteforce(double beta, std::size_t n, std::size_t t);

/// Closed form of the same quantity: with a = n - t + 1 and b = n,
///   (a beta^a (1 - beta^b) - b beta^b (1 - beta^a)) / (1 - beta^n)^2.
double lambda_closed_form(double beta, std::size_t n, std::size_t t);

/// Upper bound (n - t + 1) beta^{n-t+1} / (1 - beta^n).
double lambda_upper_bound(double beta, std::size_t n, std::size_t t);

/// Sweeps 1 <= t <= n <= n_max for each beta, checking brute force
/// against the closed form (relative tolerance rel_tol) and against the
/// upper bound.
struct LambdaGridReport {
    std::size_t cells = 0;
    double max_rel_dev = 0.0;    // |brute - closed| / max(|closed|, floor)
    double max_bound_ratio = 0.0;  // brute / bound
    bool closed_form_ok = false;
    bool bound_ok = false;
    bool pass = false;
};
LambdaGridReport lambda_bound_check(const std::vector<double>& betas, std::size_t n_max,
                                    double rel_tol = 1e-10);

/// Both sides of the variance decomposition at horizon t:
///   E_q ||Y - ybar_t||^2  <=  2 E_q ||X - xbar_t||^2 + 2 sum_s q_{t,s} ||y_s - x_s||^2
/// where both expectations weight the first t iterates by q_{t,s}.
struct VarianceDecomposition {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
};
VarianceDecomposition variance_decomposition_check(const std::vector<Vec>& xs,
                                                   const std::vector<Vec>& ys, double beta,
                                                   std::size_t t);

/// The assembled certificate bound
///   (1/(D T)) (beta Regret_T(u_T) + (1 - beta) sum_t Regret_t(u_t))
/// + (1/(D T)) sum_t (F(x_t) - F(w_t))
/// + mu D / 2 + sigma / (T sqrt(1 - beta)) + sigma sqrt(1 - beta)
/// evaluated on a finished run, next to the measured left-hand side
/// (the exact expected certificate).
///
/// Preconditions: the trace carries loss values and
/// mu >= 8 lambda D (1 + c_x_bound / (1 - beta)^2) (RegimeError naming
/// the threshold otherwise).
struct BoundReport {
    double regret_terminal = 0.0;      // Regret_T(u_T)
    double regret_running_sum = 0.0;   // sum_t Regret_t(u_t)
    double regret_term = 0.0;          // (beta R_T + (1-beta) sum R_t) / (D T)
    double decrement_sum = 0.0;        // sum_t (F(x_t) - F(w_t))
    double decrement_term = 0.0;       // decrement_sum / (D T)
    double mu_term = 0.0;              // mu D / 2
    double sigma_term_slow = 0.0;      // sigma / (T sqrt(1 - beta))
    double sigma_term_fast = 0.0;      // sigma sqrt(1 - beta)
    double rhs = 0.0;
    double lhs = 0.0;                  // expected certificate
    double slack = 0.0;                // rhs - lhs
    std::size_t degenerate_comparators = 0;
};
BoundReport assemble_certificate_bound(const ConversionTrace& trace, const Problem& problem,
                                       double beta, double mu, double D, double lambda,
                                       double sigma, double c_x_bound);

/// Measured stability factors next to the strategy guarantees.
struct CxRow {
    std::string strategy;
    double measured = 0.0;
    double bound = 0.0;
    bool pass = false;
};
CxRow cx_row(Strategy kind, const ConversionTrace& trace, double zeta);

}  // namespace o2nc
