#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "o2nc/omd.hpp"
#include "o2nc/rng.hpp"

using namespace o2nc;

TEST_CASE("one step of the discounted learner") {
    const OmdParams p{1.0, 1.0, 0.9};
    CHECK(omd_zeta(p) == doctest::Approx(0.45).epsilon(1e-15));
    const LearnerState next = omd_step(LearnerState{p, {2.0, -2.0}}, {1.0, 1.0});
    CHECK(next.delta[0] == doctest::Approx(0.45).epsilon(1e-15));
    CHECK(next.delta[1] == doctest::Approx(-1.35).epsilon(1e-15));
}

TEST_CASE("the update contracts by zeta") {
    RngStream rng(17, "contract");
    for (int i = 0; i < 500; ++i) {
        const OmdParams p{rng.next_uniform(0.01, 2.0), rng.next_uniform(0.0, 5.0),
                          rng.next_uniform(0.05, 0.999)};
        const Vec delta = rng.next_normal_vec(5);
        const Vec g = rng.next_normal_vec(5);
        const LearnerState next = omd_step(LearnerState{p, delta}, g);
        const double zeta = omd_zeta(p);
        CHECK(norm(next.delta) <= zeta * (norm(delta) + p.eta * norm(g)) * (1.0 + 1e-12));
    }
}

TEST_CASE("two-round discounted regret by hand") {
    RegretLedger ledger(0.5, 0.0);
    ledger.record({1.0}, {0.0});
    ledger.record({1.0}, {-1.0});
    // beta^1 * <1, 0 - (-1)> + beta^0 * <1, -1 - (-1)> = 0.5
    CHECK(ledger.discounted_regret({-1.0}, 2) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ledger.discounted_regret({-1.0}, 1) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK_THROWS_AS(ledger.discounted_regret({-1.0}, 3), std::out_of_range);
    CHECK_THROWS_AS(ledger.discounted_regret({-1.0}, 0), std::out_of_range);
}

TEST_CASE("single-pass regret agrees with the explicit power form") {
    RngStream rng(23, "regret");
    for (int trial = 0; trial < 30; ++trial) {
        const double beta = rng.next_uniform(0.3, 0.99);
        const double mu = rng.next_uniform(0.0, 2.0);
        RegretLedger ledger(beta, mu);
        std::vector<Vec> gs, ds;
        const std::size_t T = 25;
        for (std::size_t t = 0; t < T; ++t) {
            gs.push_back(rng.next_normal_vec(3));
            ds.push_back(rng.next_normal_vec(3));
            ledger.record(gs.back(), ds.back());
        }
        const Vec u = rng.next_normal_vec(3);
        for (std::size_t t : {std::size_t(1), std::size_t(7), T}) {
            double naive = 0.0;
            for (std::size_t s = 1; s <= t; ++s) {
                const double loss_d = dot(gs[s - 1], ds[s - 1]) + 0.5 * mu * sq_norm(ds[s - 1]);
                const double loss_u = dot(gs[s - 1], u) + 0.5 * mu * sq_norm(u);
                naive += std::pow(beta, static_cast<double>(t - s)) * (loss_d - loss_u);
            }
            CHECK(ledger.discounted_regret(u, t) ==
                  doctest::Approx(naive).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("tuned constants") {
    // 2 * 1 * 1 / (0.75 * 0.5) = 16/3 with the mu term absent
    CHECK(regret_bound_rhs(1.0, 1.0, 0.0, 0.75, 0.0) ==
          doctest::Approx(16.0 / 3.0).epsilon(1e-15));
    CHECK(regret_bound_rhs(2.0, 1.0, 0.0, 0.75, 3.0) ==
          doctest::Approx(32.0 / 3.0 + 6.0).epsilon(1e-15));
    CHECK(tuned_eta(0.25, 1.0, 0.0, 0.99) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("zeta is recomputed, not stored") {
    OmdParams p{0.5, 2.0, 0.8};
    const double before = omd_zeta(p);
    CHECK(before == doctest::Approx(0.4).epsilon(1e-15));
    p.mu = 0.0;
    CHECK(omd_zeta(p) == doctest::Approx(0.8).epsilon(1e-15));
}
