#include "degenlab/numerics.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace degenlab {

namespace {
GaussRule compute_gauss(int n) {
    // Newton iteration on P_n with the standard cosine initial guess.
    GaussRule g;
    g.nodes.resize(n);
    g.weights.resize(n);
    for (int k = 0; k < (n + 1) / 2; ++k) {
        double x = std::cos(M_PI * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int m = 2; m <= n; ++m) {
                double p2 = ((2 * m - 1) * x * p1 - (m - 1) * p0) / m;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                // one polishing pass after convergence
                p0 = 1.0;
                p1 = x;
                for (int m = 2; m <= n; ++m) {
                    double p2 = ((2 * m - 1) * x * p1 - (m - 1) * p0) / m;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        g.nodes[k] = -x;
        g.weights[k] = w;
        g.nodes[n - 1 - k] = x;
        g.weights[n - 1 - k] = w;
    }
    if (n % 2 == 1) g.nodes[n / 2] = 0.0;
    return g;
}
}  // namespace

const GaussRule& gauss_legendre(int n) {
    if (n < 1 || n > 256) throw std::invalid_argument("gauss_legendre: order out of range");
    static std::map<int, GaussRule> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss(n)).first;
    return it->second;
}

double sphere_area(int m) {
    if (m < 0) throw std::invalid_argument("sphere_area: m >= 0 required");
    return 2.0 * std::pow(M_PI, 0.5 * (m + 1)) / std::tgamma(0.5 * (m + 1));
}

double ball_volume(int d, double R) {
    return std::pow(M_PI, 0.5 * d) / std::tgamma(0.5 * d + 1.0) * std::pow(R, d);
}

double smoothstep(double x, double a, double b) {
    if (x <= a) return 0.0;
    if (x >= b) return 1.0;
    const double u = (x - a) / (b - a);
    return u * u * (3.0 - 2.0 * u);
}

double smoothstep_deriv(double x, double a, double b) {
    if (x <= a || x >= b) return 0.0;
    const double u = (x - a) / (b - a);
    return 6.0 * u * (1.0 - u) / (b - a);
}

std::uint64_t Rng::next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double Rng::uniform() { return (next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

}  // namespace degenlab
