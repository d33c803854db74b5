#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "o2nc/errors.hpp"
#include "o2nc/problem.hpp"
#include "o2nc/schedule_free.hpp"

using namespace o2nc;

TEST_CASE("derived constants at epsilon = 0.7, unit scale, no anchor motion") {
    const ParamSet p = derive_params(0.7, 1.0, 1.0, 0.0, 0.0);
    CHECK(p.beta_star == doctest::Approx(0.99).epsilon(1e-14));
    CHECK(p.d_star == doctest::Approx(0.25 * std::sqrt(0.7)).epsilon(1e-14));
    CHECK(p.mu_star == doctest::Approx(2.0 * std::sqrt(0.7)).epsilon(1e-14));
    CHECK(p.eta_star == doctest::Approx(0.05 * std::sqrt(0.7)).epsilon(1e-14));
    CHECK(p.zeta_star == doctest::Approx(0.99 / 1.07).epsilon(1e-14));
    CHECK(p.gamma == doctest::Approx(p.eta_star / (1.0 - p.zeta_star)).epsilon(1e-14));
    CHECK(p.t_min == 100);
}

TEST_CASE("eta mu collapses to epsilon^2 / (7 (G + sigma)^2) across the grid") {
    for (double eps : {0.1, 0.5, 1.0, 2.0, 3.4}) {
        for (double gs : {0.5, 1.0, 10.0}) {
            for (double lambda : {0.1, 1.0, 10.0}) {
                for (double cx : {0.0, 1.0, 16.0}) {
                    if (eps > 3.5 * gs) continue;
                    const ParamSet p = derive_params(eps, lambda, gs, 0.0, cx);
                    const double want = eps * eps / (7.0 * gs * gs);
                    CHECK(p.eta_star * p.mu_star == doctest::Approx(want).epsilon(1e-12));
                    CHECK(1.0 / p.zeta_star <= 4.0 + 1e-9);
                    // the SGD step exceeds the learner step by at least 49/8 * (G+s)^2/eps^2
                    CHECK(p.gamma / p.eta_star >= 3.5 * gs * gs / (eps * eps));
                }
            }
        }
    }
}

TEST_CASE("halving the accuracy shrinks 1 - zeta by almost exactly 4x") {
    // closed form: 1 - zeta = (8 eps^2 / 49) / (1 + eps^2 / 7) at G + sigma = 1,
    // so the halving ratio is 4 (1 + eps^2/28) / (1 + eps^2/7).
    const double g1 = 1.0 - derive_params(0.7, 1.0, 1.0, 0.0, 1.0).zeta_star;
    const double g2 = 1.0 - derive_params(0.35, 1.0, 1.0, 0.0, 1.0).zeta_star;
    const double g3 = 1.0 - derive_params(0.175, 1.0, 1.0, 0.0, 1.0).zeta_star;
    CHECK(g1 / g2 == doctest::Approx(4.07 / 1.07).epsilon(1e-12));
    CHECK(g2 / g3 == doctest::Approx(4.0175 / 1.0175).epsilon(1e-12));
    CHECK(g1 / g2 >= 3.5);
    CHECK(g1 / g2 <= 4.5);
    CHECK(g2 / g3 >= 3.5);
    CHECK(g2 / g3 <= 4.5);
}

TEST_CASE("lambda rescaling moves d, mu, eta, gamma but not beta or zeta") {
    const ParamSet a = derive_params(0.9, 1.0, 2.0, 0.5, 16.0);
    const ParamSet b = derive_params(0.9, 4.0, 2.0, 0.5, 16.0);
    CHECK(b.beta_star == a.beta_star);
    CHECK(b.d_star == doctest::Approx(a.d_star / 2.0).epsilon(1e-14));
    CHECK(b.mu_star == doctest::Approx(a.mu_star * 2.0).epsilon(1e-14));
    CHECK(b.eta_star == doctest::Approx(a.eta_star / 2.0).epsilon(1e-14));
    CHECK(b.zeta_star == doctest::Approx(a.zeta_star).epsilon(1e-14));
    CHECK(b.gamma == doctest::Approx(a.gamma / 2.0).epsilon(1e-14));
}

TEST_CASE("horizon lower bound") {
    CHECK(derive_params(1.0, 1.0, 1.0, 0.0, 0.0).t_min == 49);
    // with an initial gap the budget term 980 (G+s)^2 df sqrt(l) eps^{-7/2} wins
    CHECK(derive_params(1.0, 1.0, 1.0, 0.0, 0.0, 2.0).t_min == 1960);
}

TEST_CASE("out-of-regime and malformed inputs are rejected") {
    CHECK_THROWS_AS(derive_params(3.5 * (1.0 + 1e-6), 1.0, 1.0, 0.0, 0.0), RegimeError);
    CHECK_NOTHROW(derive_params(3.5, 1.0, 1.0, 0.0, 0.0));
    CHECK_THROWS_AS(derive_params(0.0, 1.0, 1.0, 0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(derive_params(0.5, 0.0, 1.0, 0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(derive_params(0.5, 1.0, 0.0, 0.0, 0.0), ConfigError);
    CHECK_THROWS_AS(derive_params(0.5, 1.0, 1.0, -0.1, 0.0), ConfigError);
    CHECK_THROWS_AS(derive_params(0.5, 1.0, 1.0, 0.0, -1.0), ConfigError);
    CHECK_THROWS_AS(derive_params(0.5, 1.0, 1.0, 0.0, 0.0, -2.0), ConfigError);
}

TEST_CASE("tuned config wiring") {
    const ParamSet p = derive_params(0.8, 1.0, 1.0, 0.1, 16.0);
    const SfSgdConfig cfg = SfSgdConfig::from_params(p);
    CHECK(cfg.gamma == p.gamma);
    CHECK(cfg.c == doctest::Approx(1.0 - p.zeta_star).epsilon(1e-15));
    CHECK(cfg.kappa_lo == p.zeta_star);
    CHECK(cfg.kappa_hi == 1.0);
}

TEST_CASE("one schedule-free step by hand") {
    Problem drift;
    drift.name = "unit_drift";
    drift.dim = 1;
    drift.lipschitz_G = 1.0;
    drift.value = [](const Vec& v) { return v[0]; };
    drift.gradient = [](const Vec&) { return Vec{1.0}; };
    StoGradOracle oracle(drift, 0.0, RngStream(3, "oracle"));
    RngStream mix(3, "mix");

    SfSgdConfig cfg;
    cfg.gamma = 0.1;
    cfg.c = 0.5;
    cfg.kappa_lo = cfg.kappa_hi = 0.75;  // pin the mixing draw

    SfSgdState state{{0.0}, {2.0}};
    const SfStepRecord rec = sf_sgd_step(state, cfg, oracle, mix);
    CHECK(rec.x[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(rec.kappa == 0.75);
    CHECK(rec.y[0] == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(rec.g[0] == 1.0);
    CHECK(rec.z_next[0] == doctest::Approx(1.9).epsilon(1e-15));
    CHECK(state.x[0] == rec.x[0]);
    CHECK(state.z[0] == rec.z_next[0]);

    SfSgdConfig bad = cfg;
    bad.kappa_lo = 1.2;
    CHECK_THROWS_AS(sf_sgd_step(state, bad, oracle, mix), ConfigError);
}

TEST_CASE("extrapolated iterate") {
    const Vec z = extrapolate_z({1.0}, {0.5}, 0.5);
    CHECK(z[0] == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(extrapolate_z({1.0}, {0.5}, 1.0), ConfigError);
}

TEST_CASE("kappa samples stay inside the tuned interval") {
    const ParamSet p = derive_params(1.0, 1.0, 1.0, 0.1, 16.0);
    const SfSgdConfig cfg = SfSgdConfig::from_params(p);
    const Problem problem = make_abs_sum(4);
    StoGradOracle oracle(problem, 0.1, RngStream(9, "oracle"));
    RngStream mix(9, "mix");
    const SfTrace trace = run_sf_sgd(problem, oracle, cfg, 400, Vec(4, 0.5), mix);
    for (std::size_t t = 1; t <= trace.rounds(); ++t) {
        CHECK(trace.at(t).kappa >= cfg.kappa_lo);
        CHECK(trace.at(t).kappa <= cfg.kappa_hi);
    }
}

TEST_CASE("conversion and schedule-free runs coincide pathwise") {
    const Problem problem = make_abs_sum(4);
    const ParamSet p = derive_params(0.8, 1.0, problem.lipschitz_G, 0.1, 16.0);
    const EquivalenceReport rep =
        verify_equivalence(problem, 0.1, p, 200, Vec(4, 0.5), 7);
    CHECK(rep.pass);
    CHECK(rep.rounds == 200);
    CHECK(rep.max_rel_x < 1e-10);
    CHECK(rep.max_rel_y < 1e-10);
    CHECK(rep.max_rel_z < 1e-10);
}
