#include "degenlab/construction.hpp"

#include <cmath>
#include <stdexcept>

#include "degenlab/numerics.hpp"
#include "doctest.h"

using namespace degenlab;

namespace {
const CounterexampleSpec& std_spec() {
    // d=4, p=2, theta=1/2, alpha=alpha0=24
    static CounterexampleSpec s = make_counterexample(4, 2.0, 0.5, -1.0, 48);
    return s;
}
double p4(int e) { return std::ldexp(1.0, 2 * e); }
}  // namespace

TEST_CASE("shell location is exact at dyadic points") {
    CHECK(locate_shell(0.75).i == 0);
    CHECK(locate_shell(0.75).branch == Branch::Log);
    CHECK(locate_shell(0.2).i == 1);
    CHECK(locate_shell(0.2).branch == Branch::Log);
    CHECK(locate_shell(0.1).i == 1);
    CHECK(locate_shell(0.1).branch == Branch::Quad);
    // left-closed conventions
    CHECK(locate_shell(0.5).branch == Branch::Log);
    CHECK(locate_shell(0.5).i == 0);
    CHECK(locate_shell(0.25).branch == Branch::Quad);
    CHECK(locate_shell(0.25).i == 0);
    CHECK(locate_shell(p4(-3)).i == 2);
    CHECK(locate_shell(p4(-3)).branch == Branch::Quad);
    CHECK(at_branch_interface(0.5));
    CHECK(at_branch_interface(0.25));
    CHECK(!at_branch_interface(0.3));
    CHECK_THROWS_AS(locate_shell(0.0), std::invalid_argument);
    CHECK_THROWS_AS(locate_shell(1.5), std::invalid_argument);
}

TEST_CASE("omega on the worked points") {
    const CounterexampleSpec& s = std_spec();
    CHECK(omega_theta(0.75, s) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(omega_theta(0.2, s) == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-13));
    CHECK(omega_theta(0.1, s) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-13));
}

TEST_CASE("omega envelope holds at random radii") {
    const CounterexampleSpec& s = std_spec();
    Rng rng(991);
    for (int k = 0; k < 100000; ++k) {
        const int i = int(rng.uniform(0, 40));
        const double r = rng.uniform(p4(-i - 1), p4(-i));
        CHECK(omega_theta(r, s) <= omega_envelope(r, s) * (1.0 + 1e-12));
    }
}

TEST_CASE("flux matching function collapses to the affine form at p = 2") {
    const CounterexampleSpec& s = std_spec();
    // F_i(eta) = C_Q eta - 8 (1-eta) 4^{2i}/(i+1)
    for (int i = 1; i <= 6; ++i) {
        for (double eta : {0.3, 0.8, 0.95, 0.999}) {
            const double expect = 4.0 * eta - 8.0 * (1.0 - eta) * p4(i) * p4(i) / (i + 1.0);
            CHECK(flux_match_fn(i, eta, s) == doctest::Approx(expect).epsilon(1e-12));
        }
        CHECK(flux_match_fn(i, 1.0, s) > 0.0);
        CHECK(flux_match_fn(i, 1e-12, s) < 0.0);
    }
}

TEST_CASE("eta table: closed-form roots, residuals, lower bounds") {
    const CounterexampleSpec& s = std_spec();
    CHECK(s.eta(1) == doctest::Approx(16.0 / 17.0).epsilon(1e-13));
    CHECK(s.eta(2) == doctest::Approx(512.0 / 515.0).epsilon(1e-13));
    CHECK(s.one_minus_eta(1) == doctest::Approx(1.0 / 17.0).epsilon(1e-12));
    CHECK(s.one_minus_eta(2) == doctest::Approx(3.0 / 515.0).epsilon(1e-12));
    for (int i = 0; i <= s.etas.i_max; ++i) {
        CHECK(s.etas.entries[i].rel_residual <= 1e-12);
        CHECK(!s.etas.entries[i].multiple_roots);
    }
    // (3.6) lower bound: at i=1 the bound is 1 - 1/16
    CHECK(s.etas.entries[1].lower_bound == doctest::Approx(1.0 - 1.0 / 16.0).epsilon(1e-14));
    CHECK(s.eta(1) >= 1.0 - 1.0 / 16.0);
    for (int i = s.j; i <= s.etas.i_max; ++i) CHECK(s.etas.entries[i].lower_bound_ok);
    // deep shells keep full relative precision in 1 - eta
    CHECK(s.one_minus_eta(40) > 0.0);
    CHECK(s.one_minus_eta(40) < 1e-40);
}

TEST_CASE("certified start index and certified radius") {
    const CounterexampleSpec& s = std_spec();
    CHECK(s.j == 2);
    CHECK(s.rho == doctest::Approx(1.0 / 16.0).epsilon(1e-15));
    CHECK_THROWS_AS(make_counterexample(4, 2.0, 0.5, 10.0, 32), std::invalid_argument);  // alpha < alpha0
    CHECK_THROWS_AS(make_counterexample(4, 2.0, -0.1, -1.0, 32), std::invalid_argument);
    // theta too small for finite energy: (1-theta) p >= d-1 at theta=0, p=3.2, d=4
    CHECK_THROWS_AS(make_counterexample(4, 3.2, 0.0, -1.0, 32), std::invalid_argument);
}

TEST_CASE("profile values, continuity, monotonicity") {
    const CounterexampleSpec& s = std_spec();
    CHECK(phi_eval(1.0, 0, s) == 0.0);
    // phi(4^{-i}) = i exactly, bitwise
    for (int i = 1; i <= s.etas.i_max; ++i) CHECK(phi_eval(p4(-i), 0, s) == double(i));
    // interface continuity at half 4^{-i}: both sides give i + eta_i
    for (int i = 0; i <= 20; ++i) {
        const double gamma = 0.5 * p4(-i);
        const double right = phi_eval(gamma, 0, s);  // LOG branch owns the point
        CHECK(right == doctest::Approx(i + s.eta(i)).epsilon(1e-14));
        const double left = phi_eval(gamma * (1.0 - 1e-13), 0, s);  // just inside QUAD
        CHECK(std::abs(left - right) <= 1e-12 * (1.0 + std::abs(right)));
    }
    // phi' = 0 from the QUAD side at 4^{-(i+1)}
    CHECK(phi_eval(p4(-3), 1, s) == 0.0);
    // phi nonincreasing on branches
    Rng rng(44);
    for (int k = 0; k < 3000; ++k) {
        const int i = int(rng.uniform(0, 30));
        const double r = rng.uniform(p4(-i - 1), p4(-i));
        CHECK(phi_eval(r, 1, s) <= 0.0);
    }
    // phi <= log(4/r)
    for (int k = 0; k < 3000; ++k) {
        const double r = std::exp(rng.uniform(std::log(p4(-30)), 0.0));
        CHECK(phi_eval(r, 0, s) <= std::log(4.0 / r) * (1.0 + 1e-13));
        CHECK(phi_eval(r, 0, s) >= 0.0);
    }
}

TEST_CASE("field evaluation and the finite-difference gradient oracle") {
    const CounterexampleSpec& s = std_spec();
    CHECK(field_eval(0.0, p4(-5), s).v == 5.0);
    CHECK(field_eval(0.3, 1.0, s).v == 0.0);
    Rng rng(8);
    int checked = 0;
    while (checked < 200) {
        const int i = int(rng.uniform(0, 10));
        const double lo = p4(-i - 1), hi = p4(-i);
        const double r = rng.uniform(lo + 0.05 * (hi - lo), hi - 0.05 * (hi - lo));
        if (at_branch_interface(r)) continue;
        const double mid = 0.5 * p4(-i);
        if (std::abs(r - mid) < 0.02 * (hi - lo)) continue;  // keep the stencil on one branch
        const double x1 = rng.uniform(-0.4, 0.4);
        const FieldValue f = field_eval(x1, r, s);
        const double hr = 1e-5 * r, hx = 1e-6;
        const double dvdr = (field_eval(x1, r + hr, s).v - field_eval(x1, r - hr, s).v) / (2 * hr);
        const double dvdx = (field_eval(x1 + hx, r, s).v - field_eval(x1 - hx, r, s).v) / (2 * hx);
        const double scale = std::hypot(f.grad_axial, f.grad_radial);
        CHECK(std::abs(f.grad_radial - dvdr) <= 1e-6 * scale);
        CHECK(std::abs(f.grad_axial - dvdx) <= 1e-6 * scale);
        // |grad| identity
        const double m = std::hypot(s.alpha * phi_eval(r, 0, s), phi_eval(r, 1, s)) * std::exp(s.alpha * x1);
        CHECK(m == doctest::Approx(scale).epsilon(1e-12));
        ++checked;
    }
}

TEST_CASE("unboundedness certificate") {
    const CounterexampleSpec& s = std_spec();
    for (double M : {1.0, 5.5, 17.0, 47.9}) {
        const CertificatePoint c = unboundedness_certificate(M, s);
        CHECK(c.value >= M);
        CHECK(c.x1 == 0.0);
        CHECK(field_eval(c.x1, c.r, s).v == c.value);
    }
    CHECK_THROWS_AS(unboundedness_certificate(1e9, s), std::invalid_argument);
}

TEST_CASE("radial Laplacian cancellation: Q = d-3 kills it on LOG branches") {
    // d=5, p=2: Q = max(d-3,1) = 2 = d-3
    const CounterexampleSpec s5 = make_counterexample(5, 2.0, 0.5, -1.0, 24);
    for (double r : {0.6, 0.55 * p4(-3), 0.7 * p4(-7)}) {
        REQUIRE(locate_shell(r).branch == Branch::Log);
        const double lap = phi_eval(r, 2, s5) + (s5.d - 2) * phi_eval(r, 1, s5) / r;
        const double scale = std::abs(phi_eval(r, 2, s5)) + std::abs((s5.d - 2) * phi_eval(r, 1, s5) / r);
        CHECK(std::abs(lap) <= 1e-13 * scale);
    }
    // p < 2: (p-1) phi'' + (d-2) phi'/r = 0 instead
    const CounterexampleSpec s15 = make_counterexample(4, 1.5, 0.5, -1.0, 24);
    for (double r : {0.6, 0.55 * p4(-3)}) {
        const double lap = (s15.p - 1) * phi_eval(r, 2, s15) + (s15.d - 2) * phi_eval(r, 1, s15) / r;
        const double scale = std::abs((s15.p - 1) * phi_eval(r, 2, s15));
        CHECK(std::abs(lap) <= 1e-13 * scale);
    }
}

TEST_CASE("quadratic-branch reduction bound (alpha^2 (p-1) i dominates)") {
    const CounterexampleSpec& s = std_spec();
    for (int i = 1; i <= 20; ++i) {
        const double lhs = s.alpha * s.alpha * (s.p - 1.0) * i;
        const double rhs = std::pow(4.0, s.p - 1.0) * s.params.C_Q * (i + 1.0) * (s.p + s.d - 3.0);
        CHECK(lhs >= rhs);
    }
}

TEST_CASE("shell divergence is nonnegative on certified shells") {
    const CounterexampleSpec& s = std_spec();
    for (int i = s.j; i <= s.j + 10; ++i) {
        CHECK(min_divergence_margin(i, Branch::Log, s, 1000) >= -1e-9);
        CHECK(min_divergence_margin(i, Branch::Quad, s, 1000) >= -1e-9);
    }
    // value and margin agree in sign at a sample point
    const ShellPoint pt{3, Branch::Log, 0.7 * p4(-3), 0.1};
    const DivergenceValue dv = shell_divergence(pt, s);
    CHECK(dv.margin >= 0.0);
    CHECK(dv.value >= 0.0);
}

TEST_CASE("divergence sign also certifies for p = 3 and p = 1.5") {
    const CounterexampleSpec s3 = make_counterexample(5, 3.0, 0.5, -1.0, 24);
    for (int i = s3.j; i <= s3.j + 6; ++i) {
        CHECK(min_divergence_margin(i, Branch::Log, s3, 400) >= -1e-9);
        CHECK(min_divergence_margin(i, Branch::Quad, s3, 400) >= -1e-9);
    }
    const CounterexampleSpec s15 = make_counterexample(3, 1.5, 0.5, -1.0, 24);
    for (int i = s15.j; i <= s15.j + 6; ++i) {
        CHECK(min_divergence_margin(i, Branch::Log, s15, 400) >= -1e-9);
        CHECK(min_divergence_margin(i, Branch::Quad, s15, 400) >= -1e-9);
    }
}

TEST_CASE("flux jumps: equality at the matched interface, positive jump at 4^{-i}") {
    const CounterexampleSpec& s = std_spec();
    const FluxJumpReport rep = verify_flux_jumps(s, s.j, s.j + 20, 1e-10);
    CHECK(rep.all_ok);
    for (const auto& row : rep.rows) {
        if (row.matched_interface) {
            CHECK(row.rel_mismatch <= 1e-12);
        } else {
            CHECK(row.right == 0.0);
            CHECK(row.left < 0.0);
        }
    }
    // hand value at i=1: both sides equal -64 sqrt(2) / 17
    const SignedLog below = radial_flux_one_sided(0.5 * p4(-1), true, s);
    const SignedLog above = radial_flux_one_sided(0.5 * p4(-1), false, s);
    CHECK(below.value() == doctest::Approx(-64.0 * std::sqrt(2.0) / 17.0).epsilon(1e-12));
    CHECK(above.value() == doctest::Approx(-64.0 * std::sqrt(2.0) / 17.0).epsilon(1e-12));
}

TEST_CASE("shell verification rows") {
    const CounterexampleSpec& s = std_spec();
    const auto rows = verify_shells(s, s.j, s.j + 10, 2000);
    CHECK(rows.size() == 22);
    for (const auto& row : rows) {
        CHECK(row.pass);
        CHECK(row.phi_jump <= 1e-12);
        CHECK(row.min_div_margin >= -1e-9);
    }
}

TEST_CASE("mollified residual: zero test function and positivity") {
    const CounterexampleSpec& s = std_spec();
    CHECK(mollified_residual(s, 8, [](double, double) { return 0.0; }) == 0.0);
    auto bump = [](double x1, double r) {
        (void)r;
        const double u = 1.0 - 4.0 * x1 * x1;
        return u > 0.0 ? u * u : 0.0;
    };
    const double r8 = mollified_residual(s, 8, bump);
    const double r9 = mollified_residual(s, 9, bump);
    CHECK(r8 > 0.0);
    CHECK(r9 < r8);  // decays along k
}

TEST_CASE("truncated profile clamps below the truncation radius") {
    const CounterexampleSpec& s = std_spec();
    CHECK(phi_truncated(p4(-9), 0, 6, s) == 6.0);
    CHECK(phi_truncated(p4(-9), 1, 6, s) == 0.0);
    CHECK(phi_truncated(0.3, 0, 6, s) == phi_eval(0.3, 0, s));
    CHECK(phi_truncated(p4(-6), 0, 6, s) == 6.0);  // boundary belongs to the resolved side
}
