#include "degenlab/exponents.hpp"

#include <cmath>
#include <stdexcept>

#include "degenlab/numerics.hpp"
#include "doctest.h"

using namespace degenlab;

namespace {
ExponentConfig cfg(int d, double p, double s, double t) {
    return ExponentConfig{d, p, Exponent(s), Exponent(t)};
}
ExponentConfig cfg_inf(int d, double p) {
    return ExponentConfig{d, p, Exponent::infinity(), Exponent::infinity()};
}
}  // namespace

TEST_CASE("classification of the worked pairs") {
    CHECK(classify(cfg(4, 2, 4, 4)).tag == Regime::TheoremAdmissible);  // 1/2 < 2/3
    CHECK(classify(cfg(4, 2, 3, 3)).tag == Regime::CounterexampleCritical);
    CHECK(classify(cfg_inf(4, 2)).tag == Regime::TheoremAdmissible);  // 0 < 2/3

    // strict-regime pair: p <= 1 + 1/(d-2), strictly beyond the line
    CHECK(classify(cfg(3, 1.5, 2.5, 2.5)).tag == Regime::CounterexampleStrict);
}

TEST_CASE("classification boundaries and rejects") {
    // strictly beyond the line with small p
    ExponentConfig c = cfg(3, 1.5, 2.2, 2.2);  // sum = 0.909 > p/(d-1) = 0.75
    CHECK(classify(c).tag == Regime::CounterexampleStrict);
    // exactly on the line with p <= 1+1/(d-2): CRITICAL, not counterexample
    ExponentConfig on_line = cfg(3, 1.5, 2.0, 4.0);  // 0.5 + 0.25 = 0.75 exactly
    CHECK(classify(on_line).tag == Regime::Critical);

    // side-condition failure is only possible at the s=1 equality edge
    // (sum >= line and s >= 1 force 1 + 1/t >= line, strict unless s = 1):
    // d=3, p=2.5, s=1, t=4 has sum = line = 1.25 and (t/(t+1))p = 2 >= d-1
    ExponentConfig side_fail{3, 2.5, Exponent(1.0), Exponent(4.0)};
    REQUIRE(side_fail.inv_s() + side_fail.inv_t() == side_fail.critical_sum());
    CHECK(classify(side_fail).tag == Regime::Critical);

    CHECK_THROWS_AS(classify(cfg(1, 2, 3, 3)), std::invalid_argument);
    CHECK_THROWS_AS(classify(cfg(4, 1.0, 3, 3)), std::invalid_argument);
    CHECK_THROWS_AS(classify(cfg(4, 1.5, 3, 1.9)), std::invalid_argument);  // t <= 1/(p-1)
    CHECK_THROWS_AS(classify(cfg(4, 2, 0.5, 3)), std::invalid_argument);    // s < 1
}

TEST_CASE("classification is monotone in (s,t)") {
    Rng rng(2024);
    int admissible_seen = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int d = 2 + int(rng.uniform(0, 4));
        const double p = 1.1 + rng.uniform(0, 3);
        const double s = 1.0 + rng.uniform(0, 9);
        const double t = 1.0 / (p - 1.0) + 0.05 + rng.uniform(0, 9);
        ExponentConfig c = cfg(d, p, s, t);
        if (classify(c).tag != Regime::TheoremAdmissible) continue;
        ++admissible_seen;
        ExponentConfig bigger = cfg(d, p, s + rng.uniform(0, 5), t + rng.uniform(0, 5));
        CHECK(classify(bigger).tag == Regime::TheoremAdmissible);
    }
    CHECK(admissible_seen > 100);
}

TEST_CASE("moser constants at the worked configurations") {
    const MoserConstants m = moser_constants(cfg(4, 2, 4, 4));
    CHECK(m.s_star == doctest::Approx(24.0 / 17.0).epsilon(1e-14));
    CHECK(m.delta == doctest::Approx(1.0 / 12.0).epsilon(1e-14));
    CHECK(m.chi == doctest::Approx(13.0 / 12.0).epsilon(1e-14));
    CHECK(m.sup_exponent == doctest::Approx(6.0).epsilon(1e-14));

    const MoserConstants m3 = moser_constants(cfg_inf(3, 2));
    CHECK(m3.s_star == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(m3.delta == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(m3.chi == doctest::Approx(1.5).epsilon(1e-14));

    CHECK_THROWS_WITH_AS(moser_constants(cfg(4, 2, 3, 3)), doctest::Contains("delta"),
                         std::invalid_argument);
}

TEST_CASE("delta > 0 iff s_star < tp/(t+1) on random admissible configs") {
    Rng rng(77);
    int checked = 0;
    while (checked < 1000) {
        const int d = 2 + int(rng.uniform(0, 4));
        const double p = 1.1 + rng.uniform(0, 3);
        const double s = 1.0 + rng.uniform(0, 12);
        const double t = 1.0 / (p - 1.0) + 0.05 + rng.uniform(0, 12);
        ExponentConfig c = cfg(d, p, s, t);
        if (classify(c).tag != Regime::TheoremAdmissible) continue;
        const MoserConstants m = moser_constants(c);
        ++checked;
        CHECK(m.delta > 0.0);
        CHECK(m.s_star < t * p / (t + 1.0));
        // and the identity delta = 1/s* - (1/p)(1+1/t) pins the equivalence
        CHECK((m.delta > 0.0) == (m.s_star < t * p / (t + 1.0)));
    }
}

TEST_CASE("corollary exponent and kappa formulas") {
    const MoserConstants m = moser_constants(cfg(4, 2, 4, 4));
    // (1/gamma)(s/(s-1))(1+1/delta) at gamma=2, s=4: (1/2)(4/3)(13)
    CHECK(m.corollary_exponent(2.0) == doctest::Approx(0.5 * (4.0 / 3.0) * 13.0).epsilon(1e-13));
    // kappa(alpha) = (d/(alpha p))((1/t+1/s)(1+1/delta)+1-1/s)
    CHECK(m.kappa(1.0) == doctest::Approx((4.0 / 2.0) * ((0.5) * 13.0 + 0.75)).epsilon(1e-13));
    const MoserConstants ms1 = moser_constants(cfg(3, 3, 1.0, 4.0));  // s = 1 allowed here
    CHECK_THROWS_AS(ms1.corollary_exponent(1.0), std::invalid_argument);
}

TEST_CASE("counterexample parameters") {
    const CounterexampleParams a = counterexample_params(4, 2);
    CHECK(a.Q == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(a.C_Q == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(a.alpha0 == doctest::Approx(24.0).epsilon(1e-14));

    const CounterexampleParams b = counterexample_params(5, 3);
    CHECK(b.Q == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(b.C_Q == doctest::Approx(16.0 / 3.0).epsilon(1e-14));

    const CounterexampleParams c = counterexample_params(4, 1.5);
    CHECK(c.Q == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(c.C_Q == doctest::Approx(48.0 / 7.0).epsilon(1e-13));

    CHECK_THROWS_AS(counterexample_params(2, 2), std::invalid_argument);
}

TEST_CASE("alpha0 dominates C_Q and 1 over a parameter sweep") {
    Rng rng(5150);
    for (int trial = 0; trial < 400; ++trial) {
        const int d = 3 + int(rng.uniform(0, 4));
        const double p = 1.05 + rng.uniform(0, 4);
        const CounterexampleParams cp = counterexample_params(d, p);
        CHECK(cp.alpha0 >= cp.C_Q);
        CHECK(cp.alpha0 >= 1.0);
    }
}

TEST_CASE("theta selection on and beyond the critical line") {
    // exactly critical: theta = (1/t)(d-1)/p and 1-theta = (1/s)(d-1)/p
    const ThetaSelection a = theta_from_st(cfg(4, 2, 3, 3));
    CHECK(a.theta == doctest::Approx(0.5).epsilon(1e-15));
    CHECK((1.0 - a.theta) * 2.0 < 3.0);
    CHECK(a.s_bar == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(a.t_bar == doctest::Approx(3.0).epsilon(1e-14));

    const ThetaSelection b = theta_from_st(ExponentConfig{4, 2, Exponent::infinity(), Exponent(1.5)});
    CHECK(b.theta == doctest::Approx(1.0).epsilon(1e-15));

    // strict regime: ray projection gives s_bar = t_bar = 2(d-1)/p for s = t
    const ThetaSelection c = theta_from_st(cfg(3, 1.5, 2.5, 2.5));
    CHECK(c.theta == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(c.s_bar == doctest::Approx(8.0 / 3.0).epsilon(1e-13));
    CHECK(c.t_bar == doctest::Approx(8.0 / 3.0).epsilon(1e-13));
    CHECK(c.s_bar > 2.5);
    CHECK(c.t_bar > 2.5);

    CHECK_THROWS_AS(theta_from_st(cfg(4, 2, 4, 4)), std::invalid_argument);
}

TEST_CASE("theta decomposition identities hold to roundoff") {
    Rng rng(31337);
    int done = 0;
    while (done < 300) {
        const int d = 3 + int(rng.uniform(0, 3));
        const double p = 1.1 + rng.uniform(0, 2.5);
        const double s = 1.0 + rng.uniform(0, 6);
        const double t = 1.0 / (p - 1.0) + 0.05 + rng.uniform(0, 6);
        ExponentConfig c = cfg(d, p, s, t);
        const Regime tag = classify(c).tag;
        if (tag != Regime::CounterexampleCritical && tag != Regime::CounterexampleStrict) continue;
        ThetaSelection sel{};
        try {
            sel = theta_from_st(c);
        } catch (const std::invalid_argument&) {
            continue;  // (1-theta)p >= d-1 certification failure path
        }
        ++done;
        CHECK(sel.theta >= 0.0);
        CHECK(sel.theta <= 1.0);
        CHECK(1.0 / sel.t_bar == doctest::Approx(sel.theta * p / (d - 1.0)).epsilon(1e-12));
        CHECK(1.0 / sel.s_bar == doctest::Approx((1.0 - sel.theta) * p / (d - 1.0)).epsilon(1e-12));
    }
}
