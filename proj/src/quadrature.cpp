#include "degenlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "degenlab/numerics.hpp"

namespace degenlab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double pow4i(int e) { return std::ldexp(1.0, 2 * e); }

double axial_integral(const BallIntegrand& f, double r, double R) {
    const double h2 = R * R - r * r;
    const double h = h2 > 0.0 ? std::sqrt(h2) : 0.0;
    if (std::holds_alternative<AxialExp>(f.axial)) {
        const double k = std::get<AxialExp>(f.axial).kappa;
        if (k == 0.0) return 2.0 * h;
        return 2.0 * std::sinh(k * h) / k;
    }
    if (std::holds_alternative<AxialClosed>(f.axial)) return std::get<AxialClosed>(f.axial).integral(h);
    const AxialNumeric& an = std::get<AxialNumeric>(f.axial);
    if (h == 0.0) return 0.0;
    return gauss_panel([&](double x1) { return an.f(x1, r); }, -h, h, an.nodes);
}

struct TailModel {
    bool have_fit = false;
    double logC = 0.0, logrho = 0.0, beta = 0.0;
    bool divergent = false;
    double tail = 0.0;
};

// Model for the unresolved shells: |S_i| ~ C rho^i (i+2)^{-beta}. Two regimes
// keep the fit stable: clearly geometric decay gets the full model; slow decay
// (the polynomial tails of the critically matched weight norms) pins rho = 1
// and fits beta alone, declaring divergence when beta <= 1.
TailModel fit_tail(const std::vector<double>& S, int i_first, int window) {
    TailModel m;
    const int n = static_cast<int>(S.size());
    const int lo = std::max(0, n - window);
    std::vector<std::pair<double, double>> pts;  // (i_abs, log|S|)
    bool sign_ok = true;
    const double sign = (S.empty() || S.back() >= 0.0) ? 1.0 : -1.0;
    for (int k = lo; k < n; ++k) {
        if (i_first + k < 0) continue;
        if (S[k] * sign <= 0.0) {
            sign_ok = false;
            continue;
        }
        pts.push_back({double(i_first + k), std::log(std::abs(S[k]))});
    }
    if (!sign_ok || pts.size() < 4) return m;
    if (std::abs(S.back()) < 1e-280) {  // contributions exhausted
        m.have_fit = true;
        m.tail = 0.0;
        m.beta = kInf;
        return m;
    }

    const int np = static_cast<int>(pts.size());
    double q_mean = 0.0;
    for (int k = 1; k < np; ++k) q_mean += (pts[k].second - pts[k - 1].second);
    q_mean = std::exp(q_mean / (np - 1));
    m.have_fit = true;

    if (q_mean >= 1.0 - 1e-12) {  // contributions not decreasing
        m.divergent = true;
        m.tail = kInf;
        return m;
    }

    // full least squares for (logC, logrho, beta)
    {
        double A[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
        double b[3] = {0, 0, 0};
        for (auto& pt : pts) {
            const double x[3] = {1.0, pt.first, -std::log(pt.first + 1.0)};
            for (int a = 0; a < 3; ++a) {
                b[a] += x[a] * pt.second;
                for (int c = 0; c < 3; ++c) A[a][c] += x[a] * x[c];
            }
        }
        double M[3][4] = {{A[0][0], A[0][1], A[0][2], b[0]},
                          {A[1][0], A[1][1], A[1][2], b[1]},
                          {A[2][0], A[2][1], A[2][2], b[2]}};
        bool singular = false;
        for (int c = 0; c < 3 && !singular; ++c) {
            int piv = c;
            for (int rr = c + 1; rr < 3; ++rr)
                if (std::abs(M[rr][c]) > std::abs(M[piv][c])) piv = rr;
            std::swap(M[c], M[piv]);
            if (std::abs(M[c][c]) < 1e-300) singular = true;
            for (int rr = 0; rr < 3 && !singular; ++rr) {
                if (rr == c) continue;
                const double f = M[rr][c] / M[c][c];
                for (int cc = c; cc < 4; ++cc) M[rr][cc] -= f * M[c][cc];
            }
        }
        if (!singular) {
            m.logC = M[0][3] / M[0][0];
            m.logrho = M[1][3] / M[1][1];
            m.beta = M[2][3] / M[2][2];
        } else {
            m.logrho = 0.0;  // force the polynomial refit below
        }
    }
    if (m.logrho > -1e-3) {
        // no genuine geometric component: pin rho = 1 and fit beta alone
        double sxx = 0, sx = 0, sy = 0, sxy = 0;
        for (auto& pt : pts) {
            const double x = std::log(pt.first + 1.0);
            sxx += x * x;
            sx += x;
            sy += pt.second;
            sxy += x * pt.second;
        }
        const double det = np * sxx - sx * sx;
        m.beta = -(np * sxy - sx * sy) / det;
        m.logC = (sy + m.beta * sx) / np;
        m.logrho = 0.0;
        if (m.beta <= 1.0 + 1e-3) {
            m.divergent = true;
            m.tail = kInf;
            return m;
        }
    }

    const int i_last = i_first + n - 1;
    double tail = 0.0;
    int k = i_last + 1;
    for (; k <= i_last + 20000; ++k) {
        const double term = std::exp(m.logC + k * m.logrho - m.beta * std::log(k + 1.0));
        tail += term;
        if (term < 1e-18 * (std::abs(tail) + 1e-300)) break;
    }
    if (k > i_last + 20000) {  // analytic remainder past the summed range
        const double rho = std::exp(m.logrho);
        if (rho < 1.0 - 1e-9)
            tail += std::exp(m.logC + k * m.logrho - m.beta * std::log(k + 1.0)) / (1.0 - rho);
        else if (m.beta > 1.0)
            tail += std::exp(m.logC) * std::pow(k + 1.0, 1.0 - m.beta) / (m.beta - 1.0);
    }
    m.tail = sign * tail;
    return m;
}

double corrected_value(const std::vector<double>& S, int i_first, int upto, int window) {
    double partial = 0.0;
    for (int k = 0; k < upto; ++k) partial += S[k];
    std::vector<double> head(S.begin(), S.begin() + upto);
    TailModel m = fit_tail(head, i_first, window);
    if (m.have_fit && !m.divergent && std::isfinite(m.tail)) return partial + m.tail;
    return partial;
}

IntegralResult assemble(const std::vector<double>& S, int i_first, const ShellQuadRule& rule) {
    IntegralResult res;
    res.depth = static_cast<int>(S.size());
    double partial = 0.0;
    for (int k = 0; k < res.depth; ++k) {
        partial += S[k];
        res.refinement_history.push_back({k + 1, partial});
    }
    const TailModel m = fit_tail(S, i_first, 8);
    const TailModel m2 = fit_tail(S, i_first, 14);
    res.divergent = (m.have_fit && m.divergent) || (m2.have_fit && m2.divergent);
    if (res.divergent) {
        res.value = partial;
        res.tail_estimate = kInf;
        res.converged = false;
        return res;
    }
    const double tail = m.have_fit ? m.tail : 0.0;
    res.value = partial + tail;
    double model_spread = m2.have_fit ? std::abs(m.tail - m2.tail) : std::abs(tail);
    if (!m.have_fit) {
        // no usable model; charge the last contribution as the tail bound
        model_spread = S.empty() ? 0.0 : 3.0 * std::abs(S.back());
        res.value = partial;
    }
    res.tail_estimate = model_spread + 1e-15 * std::abs(partial);

    // stability under halving the resolved depth
    const int half = std::max(4, res.depth / 2);
    double v_half = corrected_value(S, i_first, std::min(half, res.depth), 8);
    const double scale = std::max({std::abs(res.value), std::abs(v_half), 1e-300});
    const bool stable = std::abs(res.value - v_half) / scale < rule.rtol;
    res.converged = stable && (res.tail_estimate <= rule.rtol * scale);
    return res;
}

IntegralResult integrate_core(const BallIntegrand& f, int d, const ShellQuadRule& rule, double R,
                              bool with_sphere_factor, bool with_axial) {
    if (!(R > 0.0)) throw std::invalid_argument("integrate: R > 0 required");
    if (rule.depth < 4 || rule.panels_per_shell < 2 || rule.nodes_per_panel < 4)
        throw std::invalid_argument("ShellQuadRule: depth >= 4, panels_per_shell >= 2, nodes_per_panel >= 4");

    int i_first = 0;
    while (pow4i(-(i_first + 1)) >= R) ++i_first;
    while (pow4i(-i_first) < R) --i_first;  // R > 1: head shells with negative index

    const double sig = with_sphere_factor ? sphere_area(d - 2) : 1.0;
    int current_shell = 0;
    auto eval = [&](double r) {
        const double g = f.radial(r);
        const double ax = with_axial ? axial_integral(f, r, R) : 1.0;
        const double val = g * ax * std::pow(r, double(d - 2));
        if (!std::isfinite(val))
            throw std::runtime_error("integrate: non-finite integrand sample at r = " + std::to_string(r) +
                                     " (shell " + std::to_string(current_shell) + ")");
        return val;
    };

    // A panel ending exactly at r = R sees the square-root edge of the axial
    // factor sqrt(R^2 - r^2); the substitution r = R - u^2 makes it smooth.
    auto panel = [&](double a, double b) {
        if (with_axial && b == R)
            return gauss_panel([&](double u) { return 2.0 * u * eval(R - u * u); }, 0.0,
                               std::sqrt(R - a), rule.nodes_per_panel);
        return gauss_panel(eval, a, b, rule.nodes_per_panel);
    };

    std::vector<double> S;
    S.reserve(rule.depth);
    const int sub = std::max(1, rule.panels_per_shell / 2);
    for (int k = 0; k < rule.depth; ++k) {
        const int i = i_first + k;
        current_shell = i;
        const double lo = pow4i(-i - 1), hi = std::min(pow4i(-i), R);
        const double mid = std::min(0.5 * pow4i(-i), R);
        double s = 0.0;
        for (const auto& seg : {std::pair<double, double>{lo, mid}, {mid, hi}}) {
            if (!(seg.second > seg.first)) continue;
            for (int q = 0; q < sub; ++q) {
                const double a = seg.first + (seg.second - seg.first) * q / sub;
                const double b = seg.first + (seg.second - seg.first) * (q + 1) / sub;
                s += panel(a, b);
            }
        }
        S.push_back(sig * s);
    }
    return assemble(S, i_first, rule);
}

}  // namespace

IntegralResult integrate_ball_radial(const BallIntegrand& f, int d, const ShellQuadRule& rule, double R) {
    return integrate_core(f, d, rule, R, true, true);
}

IntegralResult integrate_radial(const std::function<double(double)>& g, int d,
                                const ShellQuadRule& rule, double R) {
    BallIntegrand f;
    f.radial = g;
    return integrate_core(f, d, rule, R, false, false);
}

IntegralResult IntegralResult::powered(double e) const {
    IntegralResult out = *this;
    auto tf = [&](double x) { return std::pow(x, e); };
    out.value = tf(value);
    out.tail_estimate = std::isfinite(tail_estimate) ? std::abs(tf(value + tail_estimate) - tf(value)) : kInf;
    for (auto& hv : out.refinement_history) hv.value = tf(hv.value);
    return out;
}

}  // namespace degenlab
