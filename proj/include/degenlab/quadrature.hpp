#ifndef DEGENLAB_QUADRATURE_HPP
#define DEGENLAB_QUADRATURE_HPP

#include <functional>
#include <variant>
#include <vector>

namespace degenlab {

// Shell-aligned radial rule: `depth` dyadic shells [4^{-i-1}, 4^{-i}], each
// split at its internal branch boundary, Gauss-Legendre panels inside.
struct ShellQuadRule {
    int depth = 48;
    int panels_per_shell = 2;
    int nodes_per_panel = 12;
    double rtol = 1e-6;
};

struct DepthValue {
    int depth;
    double value;  // raw partial sum through that many shells
};

struct IntegralResult {
    double value = 0.0;          // partial sum plus fitted tail of unresolved shells
    double tail_estimate = 0.0;  // uncertainty attributed to the tail model
    std::vector<DepthValue> refinement_history;
    bool converged = false;
    bool divergent = false;  // growing / non-summable shell contributions
    int depth = 0;

    // Monotone transform x -> x^e of the result (norms from integrals).
    IntegralResult powered(double e) const;
};

// Axial part of a radial-axial integrand f(x1, r) = radial(r) * (axial factor).
struct AxialExp {
    double kappa;  // factor e^{kappa x1}; integral 2 sinh(kappa h)/kappa
};
struct AxialClosed {
    std::function<double(double h)> integral;  // caller-supplied closed form
};
struct AxialNumeric {
    std::function<double(double x1, double r)> f;
    int nodes = 32;
};

struct BallIntegrand {
    std::function<double(double r)> radial;
    std::variant<AxialExp, AxialClosed, AxialNumeric> axial = AxialExp{0.0};
};

// sigma_{d-2} * int_0^R [axial integral over (-sqrt(R^2-r^2), +...)] radial(r) r^{d-2} dr
IntegralResult integrate_ball_radial(const BallIntegrand& f, int d, const ShellQuadRule& rule,
                                     double R = 1.0);

// int_0^R g(r) r^{d-2} dr, x1-section collapsed, no sphere factor.
IntegralResult integrate_radial(const std::function<double(double r)>& g, int d,
                                const ShellQuadRule& rule, double R = 1.0);

}  // namespace degenlab

#endif
