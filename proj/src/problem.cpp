#include "o2nc/problem.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"
#include "o2nc/errors.hpp"

namespace o2nc {

namespace {

double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void check_dim(const Problem& p, const Vec& x) {
    if (x.size() != p.dim)
        throw ConfigError("problem '" + p.name + "' expects dimension " + std::to_string(p.dim) +
                          ", got " + std::to_string(x.size()));
}

}  // namespace

double Problem::evaluate(const Vec& x) const {
    check_dim(*this, x);
    return value(x);
}

Vec Problem::gradient_at(const Vec& x) const {
    check_dim(*this, x);
    Vec g = gradient(x);
    const double gn = norm(g);
    if (gn > lipschitz_G * (1.0 + 1e-9))
        throw std::logic_error("problem '" + name + "' returned a gradient of norm " +
                               std::to_string(gn) + " exceeding its Lipschitz constant " +
                               std::to_string(lipschitz_G));
    return g;
}

Problem make_abs_sum(std::size_t dim) {
    Problem p;
    p.name = "abs_sum";
    p.dim = dim;
    p.lipschitz_G = std::sqrt(static_cast<double>(dim));
    p.optimum_lower_bound = 0.0;
    p.value = [](const Vec& x) {
        double s = 0.0;
        for (double v : x) s += std::fabs(v);
        return s;
    };
    p.gradient = [](const Vec& x) {
        Vec g(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = sign0(x[i]);
        return g;
    };
    return p;
}

Problem make_sharp_valley_2d() {
    Problem p;
    p.name = "sharp_valley_2d";
    p.dim = 2;
    p.lipschitz_G = std::sqrt(1.25);
    p.optimum_lower_bound = 0.0;
    p.value = [](const Vec& x) { return std::fabs(std::fabs(x[0]) - 1.0) + 0.5 * std::fabs(x[1]); };
    p.gradient = [](const Vec& x) {
        // d/dx1 ||x1| - 1| = sign(|x1| - 1) sign(x1) away from the kinks;
        // the sign(0) = 0 selection covers x1 = 0 and |x1| = 1.
        return Vec{sign0(std::fabs(x[0]) - 1.0) * sign0(x[0]), 0.5 * sign0(x[1])};
    };
    return p;
}

Problem make_smooth_quadratic(std::size_t dim, double radius) {
    if (radius <= 0.0) throw ConfigError("smooth_quadratic needs a positive radius");
    Problem p;
    p.name = "smooth_quadratic";
    p.dim = dim;
    p.lipschitz_G = radius;
    p.optimum_lower_bound = 0.0;
    p.smoothness_L = 1.0;
    p.value = [radius](const Vec& x) {
        const double r = norm(x);
        return r <= radius ? 0.5 * r * r : radius * r - 0.5 * radius * radius;
    };
    p.gradient = [radius](const Vec& x) {
        const double r = norm(x);
        if (r <= radius) return x;
        return scaled(x, radius / r);
    };
    return p;
}

std::vector<Problem> builtin_problems() {
    return {make_abs_sum(4), make_sharp_valley_2d(), make_smooth_quadratic(4)};
}

Problem make_builtin(const std::string& name, std::size_t dim) {
    if (name == "abs_sum") return make_abs_sum(dim);
    if (name == "sharp_valley_2d") return make_sharp_valley_2d();
    if (name == "smooth_quadratic") return make_smooth_quadratic(dim);
    throw ConfigError("unknown problem '" + name +
                      "' (builtins: abs_sum, sharp_valley_2d, smooth_quadratic)");
}

namespace {

struct Halfspace {
    Vec coeffs;
    double offset = 0.0;
    bool strict = false;  // ">" vs ">="
};

struct AffinePiece {
    std::vector<Halfspace> when;
    Vec coeffs;
    double offset = 0.0;
};

Vec parse_coeffs(const nlohmann::json& j, std::size_t dim, const char* where) {
    if (!j.is_array() || j.size() != dim)
        throw ConfigError(std::string(where) + ": 'coeffs' must be an array of length dim");
    Vec v(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = j[i].get<double>();
    return v;
}

}  // namespace

Problem load_piecewise_problem_json(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("problem JSON does not parse: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("problem JSON must be an object");
    for (const auto& [key, _] : doc.items()) {
        if (key != "name" && key != "dim" && key != "lipschitz_G" && key != "optimum_lower_bound" &&
            key != "pieces")
            throw ConfigError("problem JSON has unknown key '" + key + "'");
    }
    if (!doc.contains("dim") || !doc.contains("lipschitz_G") || !doc.contains("pieces"))
        throw ConfigError("problem JSON needs 'dim', 'lipschitz_G' and 'pieces'");

    const std::size_t dim = doc["dim"].get<std::size_t>();
    if (dim == 0) throw ConfigError("problem dim must be positive");
    const double G = doc["lipschitz_G"].get<double>();
    if (!(G > 0.0)) throw ConfigError("lipschitz_G must be positive");

    auto pieces = std::make_shared<std::vector<AffinePiece>>();
    for (const auto& pj : doc["pieces"]) {
        AffinePiece piece;
        piece.coeffs = parse_coeffs(pj.at("value").at("coeffs"), dim, "piece value");
        piece.offset = pj.at("value").value("offset", 0.0);
        if (norm(piece.coeffs) > G * (1.0 + 1e-12))
            throw ConfigError("piece slope norm exceeds the declared lipschitz_G");
        if (pj.contains("when")) {
            for (const auto& hj : pj["when"]) {
                Halfspace h;
                h.coeffs = parse_coeffs(hj.at("coeffs"), dim, "predicate");
                h.offset = hj.value("offset", 0.0);
                const std::string op = hj.value("op", ">=");
                if (op == ">=")
                    h.strict = false;
                else if (op == ">")
                    h.strict = true;
                else
                    throw ConfigError("predicate op must be '>=' or '>', got '" + op + "'");
                piece.when.push_back(std::move(h));
            }
        }
        pieces->push_back(std::move(piece));
    }
    if (pieces->empty()) throw ConfigError("problem JSON needs at least one piece");

    auto find_piece = [pieces](const Vec& x) -> const AffinePiece& {
        for (const auto& piece : *pieces) {
            bool ok = true;
            for (const auto& h : piece.when) {
                const double v = dot(h.coeffs, x) + h.offset;
                if (h.strict ? !(v > 0.0) : !(v >= 0.0)) {
                    ok = false;
                    break;
                }
            }
            if (ok) return piece;
        }
        throw ConfigError("no piece covers the queried point");
    };

    Problem p;
    p.name = doc.value("name", std::string("piecewise"));
    p.dim = dim;
    p.lipschitz_G = G;
    if (doc.contains("optimum_lower_bound"))
        p.optimum_lower_bound = doc["optimum_lower_bound"].get<double>();
    p.value = [find_piece](const Vec& x) {
        const AffinePiece& piece = find_piece(x);
        return dot(piece.coeffs, x) + piece.offset;
    };
    p.gradient = [find_piece](const Vec& x) { return find_piece(x).coeffs; };
    return p;
}

Problem load_piecewise_problem_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open problem file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_piecewise_problem_json(buf.str());
}

StoGradOracle::StoGradOracle(const Problem& problem, double sigma, RngStream noise_stream)
    : problem_(&problem), sigma_(sigma), stream_(noise_stream) {
    if (sigma < 0.0) throw ConfigError("oracle noise level sigma must be nonnegative");
    coord_std_ = sigma / std::sqrt(static_cast<double>(problem.dim));
}

Vec StoGradOracle::sample(const Vec& x) {
    Vec g = problem_->gradient_at(x);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += coord_std_ * stream_.next_normal();
    ++calls_;
    return g;
}

DirectionalIntegralReport directional_integral_check(const Problem& problem, const Vec& w,
                                                     const Vec& x, double tol) {
    // Piecewise-linear objectives make the integrand piecewise constant, so
    // the trapezoid error is ~1/kPoints per kink the segment crosses; 2^14
    // intervals leave an order of magnitude under the default tolerance even
    // for segments crossing several kinks.
    constexpr int kPoints = 16384;
    const Vec d = sub(x, w);
    double quad = 0.0;
    for (int k = 0; k <= kPoints; ++k) {
        const double t = static_cast<double>(k) / kPoints;
        const double endpoint_weight = (k == 0 || k == kPoints) ? 0.5 : 1.0;
        quad += endpoint_weight * dot(problem.gradient_at(axpy(w, t, d)), d);
    }
    quad /= kPoints;

    DirectionalIntegralReport r;
    r.quadrature = quad;
    r.difference = problem.evaluate(x) - problem.evaluate(w);
    const double scale = std::max(1.0, problem.lipschitz_G * norm(d));
    r.rel_error = std::fabs(quad - r.difference) / scale;
    r.pass = r.rel_error <= tol;
    return r;
}

}  // namespace o2nc
