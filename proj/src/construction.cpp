#include "degenlab/construction.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "degenlab/numerics.hpp"

namespace degenlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double pow4(int e) { return std::ldexp(1.0, 2 * e); }  // 4^e, exact

struct BranchState {
    int i;
    Branch branch;
    double phi, dphi, d2phi;
    double log_omega;
};

// Two flux terms of the matching function, evaluated from zeta = 1 - eta so
// deep shells keep full precision. Shared scale (i+1)^{(p-1)theta} 4^{i(p-1-p theta)}
// already divided out; term_log - term_quad is the paper's F_i.
struct FluxTerms {
    double term_log;   // sqrt((a(i+eta)4^{-i})^2 + (C_Q eta)^2)^{p-2} C_Q eta
    double term_quad;  // sqrt((a(i+eta)/(i+1))^2 + (8 zeta 4^i/(i+1))^2)^{p-2} 8 zeta 4^{2i}/(i+1)
};

FluxTerms flux_terms(int i, double zeta, double alpha, double p, double C_Q) {
    FluxTerms t;
    const double eta = 1.0 - zeta;
    const double a_phi = alpha * (i + eta);
    t.term_log = std::pow(std::hypot(a_phi * pow4(-i), C_Q * eta), p - 2.0) * C_Q * eta;
    const double ip1 = i + 1.0;
    t.term_quad = std::pow(std::hypot(a_phi / ip1, 8.0 * zeta * pow4(i) / ip1), p - 2.0) *
                  8.0 * zeta * pow4(i) * pow4(i) / ip1;
    return t;
}

double F_of_zeta(int i, double zeta, double alpha, double p, double C_Q) {
    const FluxTerms t = flux_terms(i, zeta, alpha, p, C_Q);
    return t.term_log - t.term_quad;
}

// Largest root of F_i in (0,1] == smallest zeta > 0 with F(1-zeta) = 0.
EtaEntry solve_eta(int i, double alpha, double p, double C_Q) {
    EtaEntry e;
    auto F = [&](double z) { return F_of_zeta(i, z, alpha, p, C_Q); };

    // F(0+) > 0 and F(1-) < 0 by the endpoint limits; scan zeta geometrically
    // until the first sign change, then bisect in log zeta.
    const double z_start = std::max(pow4(-i) * pow4(-i) * (i + 1.0) * 0x1p-20, 0x1p-1060);
    double z_lo = 0.0, f_lo = F(0.0);
    double z_hi = kNaN;
    const double ratio = std::pow(2.0, 0.125);
    for (double z = z_start; z < 1.0; z *= ratio) {
        const double f = F(z);
        if (f <= 0.0) {
            z_hi = z;
            break;
        }
        z_lo = z;
        f_lo = f;
    }
    if (!(f_lo > 0.0) || std::isnan(z_hi)) {
        throw std::runtime_error("solve_eta: no sign change of F_" + std::to_string(i) +
                                 " detected on (0,1); contradicts the endpoint limit signs");
    }
    double a = std::max(z_lo, z_hi * 0x1p-30), b = z_hi;
    if (F(a) <= 0.0) a = z_lo;  // fall back to the scanned bracket
    for (int it = 0; it < 200 && b - a > 0.0; ++it) {
        const double m = (a > 0.0) ? std::sqrt(a * b) : 0.5 * (a + b);
        if (m <= a || m >= b) break;
        if (F(m) > 0.0)
            a = m;
        else
            b = m;
    }
    const double zeta = b;
    e.one_minus_eta = zeta;
    e.eta = 1.0 - zeta;
    const FluxTerms t = flux_terms(i, zeta, alpha, p, C_Q);
    e.rel_residual = std::abs(t.term_log - t.term_quad) /
                     std::max({std::abs(t.term_log), std::abs(t.term_quad), 1e-300});

    // Rescan for further sign changes below the root (eta below eta_i).
    e.multiple_roots = false;
    {
        int sign_changes = 0;
        double prev = -1.0;  // F is <= 0 just below the root
        for (int k = 1; k <= 400; ++k) {
            const double z = zeta * std::pow(1.0 / zeta, k / 400.0);
            if (z >= 1.0) break;
            const double f = F(z);
            if (f == 0.0) continue;
            if (prev != 0.0 && ((f > 0) != (prev > 0))) ++sign_changes;
            prev = f;
        }
        e.multiple_roots = sign_changes > 0;
    }
    e.lower_bound = kNaN;
    e.lower_bound_ok = false;
    return e;
}

BranchState branch_state(int i, Branch b, double r, const CounterexampleSpec& s) {
    BranchState st;
    st.i = i;
    st.branch = b;
    const double Q = s.params.Q;
    const double denomQ = pow2m1(Q);
    const double lg4 = 2.0 * M_LN2;
    if (b == Branch::Log) {
        const double u = std::ldexp(r, 2 * i);  // 4^i r in [1/2, 1)
        const double w = std::pow(u, -Q);
        st.phi = i + s.eta(i) * (w - 1.0) / denomQ;
        st.dphi = -Q * s.eta(i) / denomQ * w / r;
        st.d2phi = Q * (Q + 1.0) * s.eta(i) / denomQ * w / (r * r);
        st.log_omega = s.theta * ((s.p - 1.0) * std::log(i + 1.0) - s.p * i * lg4);
    } else {
        const double z = std::ldexp(r, 2 * (i + 1)) - 1.0;  // 4^{i+1} r - 1 in [0, 1)
        const double zeta = s.one_minus_eta(i);
        st.phi = (i + 1.0) - zeta * z * z;
        st.dphi = -2.0 * zeta * std::ldexp(1.0, 2 * (i + 1)) * z;
        st.d2phi = -2.0 * zeta * std::ldexp(1.0, 4 * (i + 1));
        st.log_omega = (1.0 - s.theta) * (-(s.p - 1.0) * std::log(i + 1.0) + s.p * i * lg4);
    }
    return st;
}

BranchState state_at(double r, const CounterexampleSpec& s) {
    const ShellPoint pt = locate_shell(r);
    if (pt.i > s.etas.i_max)
        throw std::invalid_argument("profile evaluated below the resolved shells (i = " +
                                    std::to_string(pt.i) + " > i_max = " + std::to_string(s.etas.i_max) + ")");
    return branch_state(pt.i, pt.branch, r, s);
}

}  // namespace

ShellPoint locate_shell(double r, double x1) {
    if (!(r > 0.0) || !(r <= 1.0)) throw std::invalid_argument("locate_shell: r in (0,1] required");
    if (r == 1.0) return ShellPoint{0, Branch::Log, r, x1};  // closure of the outermost branch
    const int e = std::ilogb(r);  // r in [2^e, 2^{e+1})
    ShellPoint pt;
    pt.r = r;
    pt.x1 = x1;
    if (e % 2 == 0) {  // even: r in [4^{-i-1}, (1/2)4^{-i}) with e = -2i-2
        pt.i = (-e - 2) / 2;
        pt.branch = Branch::Quad;
    } else {  // odd: r in [(1/2)4^{-i}, 4^{-i}) with e = -2i-1
        pt.i = (-e - 1) / 2;
        pt.branch = Branch::Log;
    }
    return pt;
}

bool at_branch_interface(double r) {
    if (!(r > 0.0)) return false;
    int e;
    const double m = std::frexp(r, &e);  // r = m 2^e, m in [1/2, 1)
    return m == 0.5;
}

CounterexampleSpec make_counterexample(int d, double p, double theta, double alpha, int i_max) {
    CounterexampleSpec s;
    s.d = d;
    s.p = p;
    s.theta = theta;
    s.params = counterexample_params(d, p);
    s.alpha = (alpha < 0.0) ? s.params.alpha0 : alpha;
    if (s.alpha < s.params.alpha0)
        throw std::invalid_argument("make_counterexample: alpha = " + std::to_string(s.alpha) +
                                    " < alpha0 = " + std::to_string(s.params.alpha0) +
                                    ", certification refused");
    if (!(theta >= 0.0 && theta <= 1.0))
        throw std::invalid_argument("make_counterexample: theta in [0,1] required");
    if (!((1.0 - theta) * p < d - 1))
        throw std::invalid_argument("make_counterexample: (1-theta) p >= d-1, profile has infinite energy");
    if (i_max < 4) throw std::invalid_argument("make_counterexample: i_max >= 4 required");

    s.etas.alpha = s.alpha;
    s.etas.i_max = i_max;
    s.etas.entries.resize(i_max + 1);
    for (int i = 0; i <= i_max; ++i) {
        EtaEntry e = solve_eta(i, s.alpha, p, s.params.C_Q);
        // lower bounds of the eta sequence, branch on p
        const double factor = (p >= 2.0) ? std::pow(4.0, p - 2.0) * s.params.C_Q : s.alpha;
        const double zeta_bound = 0.125 * factor * pow4(-i) * pow4(-i) * (i + 1.0);
        e.lower_bound = 1.0 - zeta_bound;
        // the strict slack of the bound falls below one ulp for deep shells;
        // verify with a 1e-12 relative allowance
        e.lower_bound_ok = (zeta_bound > 0.0 && zeta_bound < 1.0) &&
                           (e.one_minus_eta <= zeta_bound * (1.0 + 1e-12));
        s.etas.entries[i] = e;
    }

    // Smallest j >= 2 from which the bounds hold and the divergence sign
    // certifies on a coarse deterministic sample (the verification ops re-check
    // densely).
    std::vector<bool> shell_ok(i_max + 1, false);
    for (int i = 2; i <= i_max; ++i) {
        shell_ok[i] = s.etas.entries[i].lower_bound_ok &&
                      min_divergence_margin(i, Branch::Log, s, 64) >= -1e-9 &&
                      min_divergence_margin(i, Branch::Quad, s, 64) >= -1e-9;
    }
    int j = -1;
    for (int cand = i_max; cand >= 2; --cand) {
        if (!shell_ok[cand]) break;
        j = cand;
    }
    if (j < 0) throw std::runtime_error("make_counterexample: no j <= i_max certifies the shell bounds");
    s.j = j;
    s.etas.j = j;
    s.rho = pow4(-j);
    return s;
}

CounterexampleSpec make_counterexample(const ExponentConfig& cfg, double alpha, int i_max) {
    const ThetaSelection sel = theta_from_st(cfg);
    CounterexampleSpec s = make_counterexample(cfg.d, cfg.p, sel.theta, alpha, i_max);
    s.inv_s = cfg.inv_s();
    s.inv_t = cfg.inv_t();
    return s;
}

double flux_match_fn(int i, double eta, const CounterexampleSpec& spec) {
    if (i < 0) throw std::invalid_argument("flux_match_fn: i >= 0 required");
    return F_of_zeta(i, 1.0 - eta, spec.alpha, spec.p, spec.params.C_Q);
}

double log_omega_theta(double r, const CounterexampleSpec& spec) {
    // The weight needs only the shell index, so it is not capped by i_max.
    const ShellPoint pt = locate_shell(r);
    const double lg4 = 2.0 * M_LN2;
    if (pt.branch == Branch::Log)
        return spec.theta * ((spec.p - 1.0) * std::log(pt.i + 1.0) - spec.p * pt.i * lg4);
    return (1.0 - spec.theta) * (-(spec.p - 1.0) * std::log(pt.i + 1.0) + spec.p * pt.i * lg4);
}

double omega_theta(double r, const CounterexampleSpec& spec) {
    return std::exp(log_omega_theta(r, spec));
}

double omega_envelope(double r, const CounterexampleSpec& spec) {
    const ShellPoint pt = locate_shell(r);
    const double p = spec.p;
    if (pt.branch == Branch::Log)
        return std::pow(std::pow(2.0 * r, p) * std::pow(std::log(4.0 / r), p - 1.0), spec.theta);
    return std::pow(std::pow(r, p) * std::pow(std::log(2.0 / r), p - 1.0), -(1.0 - spec.theta));
}

double phi_eval(double r, int order, const CounterexampleSpec& spec) {
    const BranchState st = state_at(r, spec);
    switch (order) {
        case 0: return st.phi;
        case 1: return st.dphi;
        case 2: return st.d2phi;
    }
    throw std::invalid_argument("phi_eval: order in {0,1,2}");
}

FieldValue field_eval(double x1, double r, const CounterexampleSpec& spec) {
    const BranchState st = state_at(r, spec);
    FieldValue f;
    const double eax = std::exp(spec.alpha * x1);
    f.v = eax * st.phi;
    f.grad_axial = spec.alpha * st.phi * eax;
    f.grad_radial = st.dphi * eax;
    const double m = std::hypot(spec.alpha * st.phi, st.dphi);
    const double mp = std::pow(m, spec.p - 2.0) * std::exp(spec.alpha * (spec.p - 1.0) * x1);
    f.flux_axial = mp * spec.alpha * st.phi;
    f.flux_radial = mp * st.dphi;
    return f;
}

DivergenceValue shell_divergence(const ShellPoint& pt, const CounterexampleSpec& spec) {
    const BranchState st = branch_state(pt.i, pt.branch, pt.r, spec);
    const double a = spec.alpha, p = spec.p, d = spec.d;
    const double G = a * a * st.phi * st.phi + st.dphi * st.dphi;
    if (G == 0.0) throw std::runtime_error("shell_divergence: degenerate gradient (alpha^2 phi^2 + phi'^2 = 0)");
    const double radial = st.d2phi + (d - 2.0) * st.dphi / pt.r;
    const double t1 = a * a * (p - 1.0) * G * st.phi;
    const double t2 = (p - 2.0) * st.dphi * st.dphi * (a * a * st.phi + st.d2phi);
    const double t3 = G * radial;
    const double bracket = t1 + t2 + t3;
    const double scale = std::abs(a * a * (p - 1.0) * G * st.phi) +
                         std::abs(p - 2.0) * st.dphi * st.dphi * (a * a * std::abs(st.phi) + std::abs(st.d2phi)) +
                         G * (std::abs(st.d2phi) + (d - 2.0) * std::abs(st.dphi) / pt.r);
    DivergenceValue out;
    out.margin = (scale > 0.0) ? bracket / scale : 0.0;
    const double logmag = 0.5 * (p - 4.0) * std::log(G) + std::log(std::abs(bracket)) +
                          a * (p - 1.0) * pt.x1;
    out.value = (bracket == 0.0) ? 0.0 : std::copysign(std::exp(logmag), bracket);
    return out;
}

double SignedLog::value() const { return sign == 0 ? 0.0 : sign * std::exp(logmag); }

SignedLog radial_flux_one_sided(double gamma, bool from_below, const CounterexampleSpec& spec) {
    if (!at_branch_interface(gamma))
        throw std::invalid_argument("radial_flux_one_sided: gamma must be a dyadic interface");
    const int e = std::ilogb(gamma);
    BranchState st;
    if (e % 2 == 0) {
        const int i = -e / 2;  // gamma = 4^{-i}: LOG(i) below, QUAD(i-1) above
        st = from_below ? branch_state(i, Branch::Log, gamma, spec)
                        : branch_state(i - 1, Branch::Quad, gamma, spec);
    } else {
        const int i = (-e - 1) / 2;  // gamma = (1/2)4^{-i}: QUAD(i) below, LOG(i) above
        st = from_below ? branch_state(i, Branch::Quad, gamma, spec)
                        : branch_state(i, Branch::Log, gamma, spec);
    }
    SignedLog out;
    if (st.dphi == 0.0) {
        out.sign = 0;
        out.logmag = -kInf;
        return out;
    }
    const double G = spec.alpha * spec.alpha * st.phi * st.phi + st.dphi * st.dphi;
    out.sign = (st.dphi > 0) ? 1 : -1;
    out.logmag = st.log_omega + 0.5 * (spec.p - 2.0) * std::log(G) + std::log(std::abs(st.dphi));
    return out;
}

FluxJumpReport verify_flux_jumps(const CounterexampleSpec& spec, int i_lo, int i_hi, double match_rtol) {
    if (i_lo < 1) throw std::invalid_argument("verify_flux_jumps: i_lo >= 1 required");
    FluxJumpReport rep;
    rep.all_ok = true;
    for (int i = i_lo; i <= i_hi; ++i) {
        {   // gamma = 4^{-i}: right limit must vanish, left strictly negative
            FluxJumpRow row;
            row.i = i;
            row.gamma = pow4(-i);
            row.matched_interface = false;
            const SignedLog lo = radial_flux_one_sided(row.gamma, true, spec);
            const SignedLog hi = radial_flux_one_sided(row.gamma, false, spec);
            row.left = lo.value();
            row.right = hi.value();
            row.rel_mismatch = kNaN;
            row.ok = (hi.sign == 0) && (lo.sign < 0);
            rep.rows.push_back(row);
        }
        {   // gamma = (1/2)4^{-i}: two-sided equality within match_rtol
            FluxJumpRow row;
            row.i = i;
            row.gamma = 0.5 * pow4(-i);
            row.matched_interface = true;
            const SignedLog lo = radial_flux_one_sided(row.gamma, true, spec);
            const SignedLog hi = radial_flux_one_sided(row.gamma, false, spec);
            row.left = lo.value();
            row.right = hi.value();
            row.rel_mismatch = (lo.sign == hi.sign && lo.sign != 0)
                                   ? std::abs(std::expm1(lo.logmag - hi.logmag))
                                   : kInf;
            row.ok = row.rel_mismatch <= match_rtol;
            rep.rows.push_back(row);
        }
    }
    for (const auto& r : rep.rows) rep.all_ok = rep.all_ok && r.ok;
    return rep;
}

double min_divergence_margin(int i, Branch b, const CounterexampleSpec& spec, int n_samples) {
    const double lo = (b == Branch::Log) ? 0.5 * pow4(-i) : pow4(-i - 1);
    const double hi = (b == Branch::Log) ? pow4(-i) : 0.5 * pow4(-i);
    Rng rng(0x5eed0000u + 131 * static_cast<std::uint64_t>(i) + (b == Branch::Log ? 0 : 1));
    double worst = kInf;
    for (int k = 0; k < n_samples; ++k) {
        const double r = lo + (hi - lo) * (1e-9 + (1.0 - 2e-9) * rng.uniform());
        const double hmax = std::sqrt(std::max(0.0, 1.0 - r * r));
        ShellPoint pt{i, b, r, rng.uniform(-hmax, hmax)};
        worst = std::min(worst, shell_divergence(pt, spec).margin);
    }
    return worst;
}

double mollified_residual(const CounterexampleSpec& spec, int k,
                          const std::function<double(double, double)>& testfn) {
    if (k < 1 || k > spec.etas.i_max) throw std::invalid_argument("mollified_residual: k out of range");
    const double a = 0.5 * pow4(-k), b = pow4(-k);
    const double sig = sphere_area(spec.d - 2);
    const double arate = spec.alpha * (spec.p - 1.0);
    const int n_radial_panels = 8, n_radial = 16, n_axial = 48;
    double total = 0.0;
    for (int pnl = 0; pnl < n_radial_panels; ++pnl) {
        const double ra = a + (b - a) * pnl / n_radial_panels;
        const double rb = a + (b - a) * (pnl + 1) / n_radial_panels;
        total += gauss_panel(
            [&](double r) {
                const BranchState st = branch_state(k, Branch::Log, r, spec);
                const double psi_d = smoothstep_deriv(r, a, b);
                const double G = spec.alpha * spec.alpha * st.phi * st.phi + st.dphi * st.dphi;
                const double radial_part = std::exp(st.log_omega) *
                                           std::pow(G, 0.5 * (spec.p - 2.0)) *
                                           std::abs(st.dphi) * psi_d *
                                           std::pow(r, spec.d - 2.0);
                const double h = std::sqrt(std::max(0.0, 1.0 - r * r));
                const double axial = gauss_panel(
                    [&](double x1) { return testfn(x1, r) * std::exp(arate * x1); }, -h, h, n_axial);
                return radial_part * axial;
            },
            ra, rb, n_radial);
    }
    return sig * total;
}

CertificatePoint unboundedness_certificate(double M, const CounterexampleSpec& spec) {
    if (!(M <= spec.etas.i_max))
        throw std::invalid_argument("unboundedness_certificate: M exceeds the resolved depth i_max");
    const int i = std::max(1, static_cast<int>(std::ceil(M)));
    CertificatePoint c;
    c.x1 = 0.0;
    c.r = pow4(-i);
    c.value = phi_eval(c.r, 0, spec);
    return c;
}

double phi_truncated(double r, int order, int k, const CounterexampleSpec& spec) {
    if (r >= pow4(-k)) return phi_eval(r, order, spec);
    return (order == 0) ? double(k) : 0.0;
}

std::vector<ShellVerifyRow> verify_shells(const CounterexampleSpec& spec, int i_lo, int i_hi,
                                          int div_samples, double div_tol, double flux_rtol,
                                          double phi_tol) {
    std::vector<ShellVerifyRow> rows;
    for (int i = i_lo; i <= i_hi; ++i) {
        for (Branch b : {Branch::Log, Branch::Quad}) {
            ShellVerifyRow row;
            row.i = i;
            row.branch = b;
            const EtaEntry& e = spec.etas.entries.at(i);
            row.eta = e.eta;
            row.rel_residual = e.rel_residual;
            row.lower_bound = e.lower_bound;
            row.lower_bound_ok = e.lower_bound_ok;
            row.min_div_margin = min_divergence_margin(i, b, spec, div_samples);

            // inner boundary of the branch
            const double gamma = (b == Branch::Log) ? 0.5 * pow4(-i) : pow4(-i - 1);
            bool flux_ok = true;
            row.flux_rel_mismatch = kNaN;
            if (b == Branch::Log) {
                const SignedLog lo = radial_flux_one_sided(gamma, true, spec);
                const SignedLog hi = radial_flux_one_sided(gamma, false, spec);
                row.flux_left = lo.value();
                row.flux_right = hi.value();
                row.flux_rel_mismatch = (lo.sign == hi.sign && lo.sign != 0)
                                            ? std::abs(std::expm1(lo.logmag - hi.logmag))
                                            : kInf;
                flux_ok = row.flux_rel_mismatch <= flux_rtol;
                const double below = branch_state(i, Branch::Quad, gamma, spec).phi;
                const double above = branch_state(i, Branch::Log, gamma, spec).phi;
                row.phi_jump = std::abs(below - above);
            } else {
                if (i + 1 <= spec.etas.i_max) {
                    const SignedLog lo = radial_flux_one_sided(gamma, true, spec);
                    const SignedLog hi = radial_flux_one_sided(gamma, false, spec);
                    row.flux_left = lo.value();
                    row.flux_right = hi.value();
                    flux_ok = (hi.sign == 0) && (lo.sign < 0);
                    const double below = branch_state(i + 1, Branch::Log, gamma, spec).phi;
                    const double above = branch_state(i, Branch::Quad, gamma, spec).phi;
                    row.phi_jump = std::abs(below - above);
                } else {
                    row.flux_left = row.flux_right = kNaN;
                    row.phi_jump = 0.0;
                }
            }
            const bool bound_ok = (i >= spec.j) ? row.lower_bound_ok : true;
            row.pass = bound_ok && (row.min_div_margin >= -div_tol) && flux_ok &&
                       (row.phi_jump <= phi_tol) && (e.rel_residual <= 1e-12);
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace degenlab
