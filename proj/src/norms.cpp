#include "degenlab/norms.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "degenlab/numerics.hpp"

namespace degenlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

IntegralResult weight_power_integral(const CounterexampleSpec& spec, double power,
                                     const ShellQuadRule& rule) {
    BallIntegrand f;
    f.radial = [&spec, power](double r) { return std::exp(power * log_omega_theta(r, spec)); };
    f.axial = AxialExp{0.0};
    return integrate_ball_radial(f, spec.d, rule, 1.0);
}

// ess-sup of omega^{sign} over B_1, shell maxima up to the rule's depth
IntegralResult weight_sup(const CounterexampleSpec& spec, double sign, const ShellQuadRule& rule) {
    IntegralResult res;
    double sup = 0.0;
    double last = 0.0;
    bool decreasing_tail = true;
    for (int i = 0; i < rule.depth; ++i) {
        const double wlog = std::exp(sign * log_omega_theta(0.75 * std::ldexp(1.0, -2 * i), spec));
        const double wquad = std::exp(sign * log_omega_theta(0.375 * std::ldexp(1.0, -2 * i), spec));
        const double m = std::max(wlog, wquad);
        if (i >= rule.depth - 8 && m > last && i > 0) decreasing_tail = false;
        last = m;
        sup = std::max(sup, m);
        res.refinement_history.push_back({i + 1, sup});
    }
    res.depth = rule.depth;
    res.value = sup;
    res.tail_estimate = decreasing_tail ? 0.0 : kInf;
    res.divergent = !decreasing_tail;
    res.converged = decreasing_tail;
    return res;
}
}  // namespace

WeightNorms weight_norms(const CounterexampleSpec& spec, const ShellQuadRule& rule) {
    if (!spec.inv_s || !spec.inv_t)
        throw std::invalid_argument("weight_norms: spec carries no (s,t); use the explicit overload");
    return weight_norms(spec, *spec.inv_s, *spec.inv_t, rule);
}

WeightNorms weight_norms(const CounterexampleSpec& spec, double inv_s, double inv_t,
                         const ShellQuadRule& rule) {
    WeightNorms out;
    if (inv_s == 0.0)
        out.norm_s = weight_sup(spec, +1.0, rule);
    else
        out.norm_s = weight_power_integral(spec, 1.0 / inv_s, rule).powered(inv_s);
    if (inv_t == 0.0)
        out.norm_t_inverse = weight_sup(spec, -1.0, rule);
    else
        out.norm_t_inverse = weight_power_integral(spec, -1.0 / inv_t, rule).powered(inv_t);
    return out;
}

EnergyIntegrals energy_integrals(const CounterexampleSpec& spec, const ShellQuadRule& rule) {
    const int cap = spec.etas.i_max;
    ShellQuadRule r = rule;
    if (r.depth > cap) r.depth = cap;  // profile resolved down to i_max only
    EnergyIntegrals out;
    BallIntegrand zero;
    zero.radial = [&spec](double rr) {
        const double w = omega_theta(rr, spec);
        return w * std::pow(phi_eval(rr, 0, spec), spec.p);
    };
    zero.axial = AxialExp{spec.p * spec.alpha};
    out.zeroth = integrate_ball_radial(zero, spec.d, r, 1.0);

    BallIntegrand first;
    first.radial = [&spec](double rr) {
        const double w = omega_theta(rr, spec);
        const double ph = phi_eval(rr, 0, spec);
        const double dph = phi_eval(rr, 1, spec);
        const double G = spec.alpha * spec.alpha * ph * ph + dph * dph;
        return w * std::pow(G, 0.5 * spec.p);
    };
    first.axial = AxialExp{spec.p * spec.alpha};
    out.first = integrate_ball_radial(first, spec.d, r, 1.0);
    return out;
}

double sobolev_norm(const BallIntegrand& u_pow_gamma, const BallIntegrand& grad_pow_gamma,
                    double gamma, double R, int d, const ShellQuadRule& rule) {
    if (!(gamma >= 1.0)) throw std::invalid_argument("sobolev_norm: gamma >= 1 required");
    const double Iu = integrate_ball_radial(u_pow_gamma, d, rule, R).value;
    const double Ig = integrate_ball_radial(grad_pow_gamma, d, rule, R).value;
    return std::pow(R, -double(d) / gamma) * std::pow(Iu, 1.0 / gamma) +
           std::pow(R, 1.0 - double(d) / gamma) * std::pow(Ig, 1.0 / gamma);
}

double profile_sobolev_norm(const CounterexampleSpec& spec, int truncation_k, double gamma,
                            double R, const ShellQuadRule& rule) {
    ShellQuadRule r = rule;
    if (r.depth > spec.etas.i_max) r.depth = spec.etas.i_max;
    auto phik = [&spec, truncation_k](double rr, int order) {
        return truncation_k >= 0 ? phi_truncated(rr, order, truncation_k, spec)
                                 : phi_eval(rr, order, spec);
    };
    BallIntegrand up;
    up.radial = [phik, gamma](double rr) { return std::pow(phik(rr, 0), gamma); };
    up.axial = AxialExp{gamma * spec.alpha};
    BallIntegrand gp;
    gp.radial = [phik, gamma, &spec](double rr) {
        const double ph = phik(rr, 0), dph = phik(rr, 1);
        return std::pow(spec.alpha * spec.alpha * ph * ph + dph * dph, 0.5 * gamma);
    };
    gp.axial = AxialExp{gamma * spec.alpha};
    return sobolev_norm(up, gp, gamma, R, spec.d, r);
}

double lambda_functional(const std::function<double(double)>& lambda_radial,
                         const std::function<double(double)>& mu_radial, int d, double R,
                         const Exponent& s, const Exponent& t, const ShellQuadRule& rule) {
    const double vol = ball_volume(d, R);
    auto checked = [](const std::function<double(double)>& f, double r, const char* name) {
        const double v = f(r);
        if (!(v > 0.0))
            throw std::invalid_argument(std::string("lambda_functional: nonpositive ") + name + " sample");
        return v;
    };
    double mu_part, lam_part;
    if (s.is_infinite()) {
        // ess-sup over the sampled panels
        double sup = 0.0;
        BallIntegrand probe;
        probe.radial = [&](double r) {
            sup = std::max(sup, checked(mu_radial, r, "mu"));
            return 0.0;
        };
        integrate_ball_radial(probe, d, rule, R);
        mu_part = sup;
    } else {
        BallIntegrand f;
        f.radial = [&](double r) { return std::pow(checked(mu_radial, r, "mu"), s.value()); };
        const IntegralResult ir = integrate_ball_radial(f, d, rule, R);
        mu_part = ir.divergent ? kInf : std::pow(ir.value / vol, 1.0 / s.value());
    }
    if (t.is_infinite()) {
        double sup = 0.0;
        BallIntegrand probe;
        probe.radial = [&](double r) {
            sup = std::max(sup, 1.0 / checked(lambda_radial, r, "lambda"));
            return 0.0;
        };
        integrate_ball_radial(probe, d, rule, R);
        lam_part = sup;
    } else {
        BallIntegrand f;
        f.radial = [&](double r) { return std::pow(checked(lambda_radial, r, "lambda"), -t.value()); };
        const IntegralResult ir = integrate_ball_radial(f, d, rule, R);
        lam_part = ir.divergent ? kInf : std::pow(ir.value / vol, 1.0 / t.value());
    }
    return mu_part * lam_part;
}

double truncated_sup(const CounterexampleSpec& spec, int k, double ball_radius) {
    // v_k(x1, r) = e^{alpha x1} phi_k(r) is decreasing in r and increasing in
    // x1; on the plateau r <= 4^{-k} the sup is k e^{alpha sqrt(R^2 - r^2)},
    // maximized as r -> 0.
    const double plateau = double(k) * std::exp(spec.alpha * ball_radius);
    // also scan shell corners above the plateau (phi can exceed k only below r_k)
    double best = plateau;
    for (int i = 0; i <= std::min(k, spec.etas.i_max); ++i) {
        const double r = std::ldexp(1.0, -2 * i);
        if (r >= ball_radius) continue;
        const double x1 = std::sqrt(ball_radius * ball_radius - r * r);
        best = std::max(best, phi_truncated(r, 0, k, spec) * std::exp(spec.alpha * x1));
    }
    return best;
}

}  // namespace degenlab
