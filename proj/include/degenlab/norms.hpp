#ifndef DEGENLAB_NORMS_HPP
#define DEGENLAB_NORMS_HPP

#include <functional>
#include <utility>

#include "degenlab/construction.hpp"
#include "degenlab/quadrature.hpp"

namespace degenlab {

// ||lambda_theta||_{L^s(B_1)} and ||lambda_theta^{-1}||_{L^t(B_1)}; the pair
// (s, t) defaults to the one the spec was built from.
struct WeightNorms {
    IntegralResult norm_s;
    IntegralResult norm_t_inverse;
};
WeightNorms weight_norms(const CounterexampleSpec& spec, const ShellQuadRule& rule);
WeightNorms weight_norms(const CounterexampleSpec& spec, double inv_s, double inv_t,
                         const ShellQuadRule& rule);

// int lambda_theta |v|^p and int lambda_theta |grad v|^p over B_1.
struct EnergyIntegrals {
    IntegralResult zeroth;
    IntegralResult first;
};
EnergyIntegrals energy_integrals(const CounterexampleSpec& spec, const ShellQuadRule& rule);

// Scale-invariant norm R^{-d/g}||u||_{L^g(B_R)} + R^{1-d/g}||grad u||_{L^g(B_R)}
// from caller-supplied integrands for |u|^g and |grad u|^g.
double sobolev_norm(const BallIntegrand& u_pow_gamma, const BallIntegrand& grad_pow_gamma,
                    double gamma, double R, int d, const ShellQuadRule& rule);

// The same norm of the (optionally truncated) subsolution profile; k < 0
// means untruncated.
double profile_sobolev_norm(const CounterexampleSpec& spec, int truncation_k, double gamma,
                            double R, const ShellQuadRule& rule);

// Lambda(B_R) = (avg mu^s)^{1/s} (avg lambda^{-t})^{1/t} for radial weights.
// Infinite exponents use the max over quadrature samples. Returns +inf when a
// constituent integral diverges.
double lambda_functional(const std::function<double(double r)>& lambda_radial,
                         const std::function<double(double r)>& mu_radial, int d, double R,
                         const Exponent& s, const Exponent& t, const ShellQuadRule& rule);

// sup over B_{1/2} of the truncated profile v_k (analytic, no grid).
double truncated_sup(const CounterexampleSpec& spec, int k, double ball_radius = 0.5);

}  // namespace degenlab

#endif
