#ifndef DEGENLAB_NUMERICS_HPP
#define DEGENLAB_NUMERICS_HPP

#include <cstdint>
#include <vector>

namespace degenlab {

// Gauss-Legendre nodes/weights on [-1, 1], cached per order.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_legendre(int n);

// Integrate f over [a, b] with one n-point panel.
template <typename F>
double gauss_panel(F&& f, double a, double b, int n) {
    const GaussRule& g = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int q = 0; q < n; ++q) s += g.weights[q] * f(mid + half * g.nodes[q]);
    return s * half;
}

// Surface area of the unit sphere S^m in R^{m+1}; sphere_area(0) = 2.
double sphere_area(int m);
// Volume of the radius-R ball in R^d.
double ball_volume(int d, double R);

// C1 ramp: 0 below a, 1 above b, 3u^2-2u^3 in between. Max slope 1.5/(b-a).
double smoothstep(double x, double a, double b);
double smoothstep_deriv(double x, double a, double b);

// Deterministic PRNG (splitmix64) with a portable uniform double in [0,1).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64();
    double uniform();                      // [0, 1)
    double uniform(double lo, double hi);  // [lo, hi)
private:
    std::uint64_t state_;
};

}  // namespace degenlab

#endif
