#include "degenlab/exponents.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace degenlab {

Exponent::Exponent()
    : value_(std::numeric_limits<double>::infinity()), infinite_(true) {}

void ExponentConfig::validate() const {
    if (d < 2) throw std::invalid_argument("ExponentConfig: d >= 2 required, got d = " + std::to_string(d));
    if (!(p > 1.0)) throw std::invalid_argument("ExponentConfig: p > 1 required, got p = " + std::to_string(p));
    if (!s.is_infinite() && !(s.value() >= 1.0))
        throw std::invalid_argument("ExponentConfig: s >= 1 required, got s = " + std::to_string(s.value()));
    // t > 1/(p-1), i.e. 1/t < p-1 with 1/inf = 0.
    if (!(inv_t() < p - 1.0))
        throw std::invalid_argument("ExponentConfig: t > 1/(p-1) required, got t = " +
                                    std::to_string(t.value()) + " with 1/(p-1) = " + std::to_string(1.0 / (p - 1.0)));
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::TheoremAdmissible: return "THEOREM_ADMISSIBLE";
        case Regime::Critical: return "CRITICAL";
        case Regime::CounterexampleCritical: return "COUNTEREXAMPLE_CRITICAL";
        case Regime::CounterexampleStrict: return "COUNTEREXAMPLE_STRICT";
        case Regime::Outside: return "OUTSIDE";
    }
    return "?";
}

namespace {
std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}
}  // namespace

Classification classify(const ExponentConfig& cfg) {
    cfg.validate();
    Classification out;
    const double sum = cfg.inv_s() + cfg.inv_t();
    const double line = cfg.critical_sum();

    if (sum < line) {
        out.tag = Regime::TheoremAdmissible;
        out.reasons.push_back("1/s + 1/t = " + fmt(sum) + " < p/(d-1) = " + fmt(line) + ": admissible");
        return out;
    }
    out.reasons.push_back("1/s + 1/t = " + fmt(sum) + " >= p/(d-1) = " + fmt(line) + ": not admissible");

    const double p_threshold = 1.0 + 1.0 / (cfg.d - 2 > 0 ? cfg.d - 2 : 1);
    const bool dim_ok = cfg.d >= 3;
    out.reasons.push_back(dim_ok ? "d >= 3: construction dimension ok"
                                 : "d = 2: construction requires d >= 3");
    // side condition (t/(t+1)) p < d-1, written 1/t-free for t = inf.
    const double side = cfg.p / (1.0 + cfg.inv_t());
    const bool side_ok = side < cfg.d - 1;
    out.reasons.push_back("(t/(t+1)) p = " + fmt(side) + (side_ok ? " < " : " >= ") + "d-1 = " + fmt(double(cfg.d - 1)));

    if (dim_ok && side_ok && cfg.p > p_threshold) {
        out.reasons.push_back("p = " + fmt(cfg.p) + " > 1 + 1/(d-2) = " + fmt(p_threshold) +
                              ": critical-line construction applies (weak inequality)");
        out.tag = Regime::CounterexampleCritical;
        return out;
    }
    if (dim_ok && side_ok && cfg.p <= p_threshold && sum > line) {
        out.reasons.push_back("p = " + fmt(cfg.p) + " <= 1 + 1/(d-2) = " + fmt(p_threshold) +
                              " and 1/s + 1/t > p/(d-1) strictly: strict-regime construction applies");
        out.tag = Regime::CounterexampleStrict;
        return out;
    }
    out.tag = (sum == line) ? Regime::Critical : Regime::Outside;
    out.reasons.push_back(sum == line ? "exactly on the critical line, construction hypotheses not met"
                                      : "beyond the critical line, construction hypotheses not met");
    return out;
}

MoserConstants moser_constants(const ExponentConfig& cfg) {
    cfg.validate();
    MoserConstants m;
    m.d = cfg.d;
    m.p = cfg.p;
    m.inv_s = cfg.inv_s();
    m.inv_t = cfg.inv_t();

    const double inv_star = (1.0 / cfg.p) * (1.0 - m.inv_s) + 1.0 / (cfg.d - 1);
    m.s_star = std::max(1.0, 1.0 / inv_star);
    m.delta = 1.0 / m.s_star - (1.0 / cfg.p) * (1.0 + m.inv_t);
    m.chi = 1.0 + m.delta;
    // exactly-critical pairs land at delta = 0 up to one ulp of the O(1) terms
    if (!(m.delta > 1e-14)) {
        throw std::invalid_argument("moser_constants: delta = " + fmt(m.delta) +
                                    " <= 0 (critical or outside regime); iteration gain is empty");
    }
    m.sup_exponent = 1.0 / (cfg.p * m.delta);
    return m;
}

double MoserConstants::corollary_exponent(double gamma) const {
    if (!(gamma > 0)) throw std::invalid_argument("corollary_exponent: gamma > 0 required");
    if (!(inv_s < 1.0)) throw std::invalid_argument("corollary_exponent: s > 1 required (s = 1 given)");
    const double s_frac = 1.0 / (1.0 - inv_s);  // s/(s-1)
    return (1.0 / gamma) * s_frac * (1.0 + 1.0 / delta);
}

double MoserConstants::kappa(double alpha) const {
    if (!(alpha >= 1.0)) throw std::invalid_argument("kappa: alpha >= 1 required");
    return (d / (alpha * p)) * ((inv_t + inv_s) * (1.0 + 1.0 / delta) + 1.0 - inv_s);
}

double pow2m1(double q) {
    if (q >= 0.5) return std::pow(2.0, q) - 1.0;  // no cancellation, exact at integers
    return std::expm1(q * M_LN2);
}

CounterexampleParams counterexample_params(int d, double p) {
    if (d < 3) throw std::invalid_argument("counterexample_params: d >= 3 required (codimension-2 axis), got d = " + std::to_string(d));
    if (!(p > 1.0)) throw std::invalid_argument("counterexample_params: p > 1 required");
    CounterexampleParams cp;
    cp.Q = (p >= 2.0) ? std::max(double(d - 3), 1.0) : (d - 2) / (p - 1.0) - 1.0;
    if (!(cp.Q > 0.0)) throw std::invalid_argument("counterexample_params: Q <= 0");
    cp.C_Q = cp.Q * std::pow(2.0, cp.Q + 1.0) / pow2m1(cp.Q);
    const double candidates[5] = {
        1.0,
        cp.C_Q,
        std::pow(2.0, (2.0 - p) / (p - 1.0)) * cp.C_Q,
        std::pow(2.0, p) * std::sqrt(cp.C_Q * (1.0 + (d - 2) / (p - 1.0))),
        8.0 * (d - 1) / (p - 1.0),
    };
    cp.alpha0 = candidates[0];
    for (double c : candidates) cp.alpha0 = std::max(cp.alpha0, c);
    return cp;
}

ThetaSelection theta_from_st(const ExponentConfig& cfg) {
    const Classification cls = classify(cfg);
    if (cls.tag != Regime::CounterexampleCritical && cls.tag != Regime::CounterexampleStrict) {
        throw std::invalid_argument("theta_from_st: configuration is " + std::string(regime_name(cls.tag)) +
                                    ", needs a counterexample regime");
    }
    const double sum = cfg.inv_s() + cfg.inv_t();
    // Project (1/s, 1/t) along its ray onto the critical line; on the line this
    // is the identity and theta = (1/t)(d-1)/p.
    const double scale = cfg.critical_sum() / sum;
    ThetaSelection sel;
    sel.theta = cfg.inv_t() / sum;
    sel.t_bar = (cfg.inv_t() == 0.0) ? std::numeric_limits<double>::infinity() : 1.0 / (scale * cfg.inv_t());
    sel.s_bar = (cfg.inv_s() == 0.0) ? std::numeric_limits<double>::infinity() : 1.0 / (scale * cfg.inv_s());
    if (!((1.0 - sel.theta) * cfg.p < cfg.d - 1)) {
        throw std::invalid_argument("theta_from_st: (1-theta) p = " + fmt((1.0 - sel.theta) * cfg.p) +
                                    " >= d-1, finite-energy requirement fails");
    }
    return sel;
}

}  // namespace degenlab
