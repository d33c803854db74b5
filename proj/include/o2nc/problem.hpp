#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "o2nc/rng.hpp"
#include "o2nc/vec.hpp"

namespace o2nc {

/// A nonsmooth objective with a measurable subgradient selection.
///
/// `gradient` must return a selection from the Clarke subdifferential;
/// at kinks the convention sign(0) = 0 keeps selections bounded.  Every
/// gradient query is audited against the advertised Lipschitz constant
/// (norm at most G within 1e-9 relative slack) so a mis-specified G
/// fails fast instead of silently corrupting tuned step sizes.
struct Problem {
    std::string name;
    std::size_t dim = 0;
    double lipschitz_G = 0.0;
    std::function<double(const Vec&)> value;
    std::function<Vec(const Vec&)> gradient;
    std::optional<double> optimum_lower_bound;
    std::optional<double> smoothness_L;  // set only when F is L-smooth

    double evaluate(const Vec& x) const;
    Vec gradient_at(const Vec& x) const;  // dimension check + Lipschitz audit
};

/// F(x) = sum_i |x_i|.  G = sqrt(d), inf F = 0.
Problem make_abs_sum(std::size_t dim);

/// Two-dimensional piecewise-linear valley
///
///     F(x1, x2) = | |x1| - 1 | + |x2| / 2.
///
/// Global minima at (+-1, 0) with value 0; the ridge x1 = 0 is a
/// nonsmooth saddle (0 lies in the Clarke subdifferential there), so the
/// problem has several distinct Goldstein-stationary points.  G =
/// sqrt(1.25), inf F = 0.
Problem make_sharp_valley_2d();

/// Huberized quadratic: F(x) = ||x||^2 / 2 inside the ball ||x|| <= radius,
/// extended as radius * ||x|| - radius^2 / 2 outside so the gradient stays
/// bounded.  G = radius, smoothness L = 1, inf F = 0.
Problem make_smooth_quadratic(std::size_t dim, double radius = 1.0);

/// Catalog of the builtin problems at default sizes.
std::vector<Problem> builtin_problems();

/// Builtin problem by name; `dim` applies to the dimension-parametric ones.
Problem make_builtin(const std::string& name, std::size_t dim);

/// Piecewise-linear problem from its JSON text.  The document lists
/// affine pieces guarded by halfspace predicates; the first piece whose
/// predicates all hold supplies both value and gradient at the query
/// point.  See README for the schema.
Problem load_piecewise_problem_json(const std::string& json_text);

/// Loads the file at `path` and parses it with load_piecewise_problem_json.
Problem load_piecewise_problem_file(const std::string& path);

/// First-order oracle g = grad F(x) + noise with isotropic Gaussian noise
/// of total variance sigma^2 (per coordinate sigma^2 / d).  Each call
/// consumes exactly one draw of d normals from its stream, so call
/// sequences at equal length stay aligned across runs regardless of the
/// query points.
class StoGradOracle {
public:
    StoGradOracle(const Problem& problem, double sigma, RngStream noise_stream);

    Vec sample(const Vec& x);

    double sigma() const { return sigma_; }
    const Problem& problem() const { return *problem_; }
    long long calls() const { return calls_; }

private:
    const Problem* problem_;
    double sigma_;
    double coord_std_;
    RngStream stream_;
    long long calls_ = 0;
};

/// Checks F(x) - F(w) against a fine trapezoid quadrature of
/// t -> <grad F(w + t (x - w)), x - w> on [0, 1].  The discrepancy is
/// measured relative to max(1, G * ||x - w||), the natural scale of both
/// sides; piecewise-linear objectives integrate exactly up to
/// kink-crossing error, which that scale absorbs with margin.
struct DirectionalIntegralReport {
    double quadrature = 0.0;
    double difference = 0.0;
    double rel_error = 0.0;
    bool pass = false;
};
DirectionalIntegralReport directional_integral_check(const Problem& problem, const Vec& w,
                                                     const Vec& x, double tol = 1e-3);

}  // namespace o2nc
