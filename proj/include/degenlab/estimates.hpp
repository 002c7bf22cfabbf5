#ifndef DEGENLAB_ESTIMATES_HPP
#define DEGENLAB_ESTIMATES_HPP

#include <vector>

#include "degenlab/exponents.hpp"
#include "degenlab/grid.hpp"
#include "degenlab/solver.hpp"

namespace degenlab {

// Frozen reference ratios from the uniformly elliptic calibration family
// (d = 3 ball, h = 1/32, p in {1.5, 2, 3}, 20 seeded polynomial boundary data);
// bound checks assert at twice these.
extern const double kMoserRatioRef;
extern const double kSphereRatioRef;
extern const double kCorollaryRatioRef;
extern const double kCutoffRatioRef;

// Grid-level building blocks over the ball |x| <= R (triangle sums).
double grid_lambda_functional(const AxisymGrid& g, const WeightFn& lambda, const WeightFn& mu,
                              const Exponent& s, const Exponent& t, double R);
// R^{-d/g}||u_+||_{L^g} + R^{1-d/g}||grad u_+||_{L^g} over |x| <= R.
double grid_sobolev_norm(const GridField& u_plus, double gamma, double R);
// (fint_{B_R} u_+^gamma)^{1/gamma}
double grid_mean_power(const GridField& u_plus, double gamma, double R);
double grid_sup(const GridField& u, double R);  // max over in-mask nodes with |x| <= R

struct CaccioppoliResult {
    double lhs;  // int eta^p lambda u_+^{beta-1} |grad u_+|^p
    double rhs;  // (p/beta)^p int u_+^{p+beta-1} mu |grad eta|^p
};
CaccioppoliResult caccioppoli_check(const GridField& u, const WeightFn& lambda, const WeightFn& mu,
                                    const GridField& eta, double beta, double p);

struct CutoffResult {
    double J_min;
    double bound_rhs;
    std::vector<double> radii;        // 1-D optimization mesh
    std::vector<double> eta_profile;  // optimized cutoff values on `radii`
};
// inf over radial cutoffs (1 on B_rho, 0 outside B_sigma) of int mu |v|^p |grad eta|^p,
// by convex descent on the discretized profile; bound_rhs is the Lemma majorant
// with integrability exponent s.
CutoffResult cutoff_optimize(const WeightFn& mu, const GridField& v, double rho, double sigma,
                             double p, const Exponent& s);

struct MoserCheck {
    double sup_val;    // max of u over B_{R/2} nodes
    double bound_val;  // Lambda^{1/(p delta)} ||u_+||_{W^{1,pt/(t+1)}(B_R)}
    double ratio;      // 0 when sup_val <= 0
    double Lambda;
    double norm;
};
MoserCheck moser_bound_check(const GridField& u, const WeightFn& lambda, const WeightFn& mu,
                             const ExponentConfig& cfg, double R);

struct SphereMaxResult {
    double interior_sup;  // max u_+ over B_{1/2}
    double band_sup;      // max u_+ over the chosen generic sphere band
    double sphere_bound;  // calibrated W^{1,pt/(t+1)}(S_{r0}) majorant
    double r0;
};
// Requires 1 + 1/t < p/(d-1), or d = 2 (then the W^{1,1} route is used).
SphereMaxResult sphere_max_bound(const GridField& u, const ExponentConfig& cfg);

struct CorollaryCheck {
    double sup_val;
    double bound_val;  // Lambda^{(1/g)(s/(s-1))(1+1/delta)} (fint u_+^g)^{1/g}
};
CorollaryCheck corollary_check(const GridField& u, const WeightFn& lambda, const WeightFn& mu,
                               const ExponentConfig& cfg, double gamma, double R = 1.0);

// The frozen calibration family: seeded random polynomials in (x1, r^2).
std::function<double(double, double)> calibration_boundary(int index);

}  // namespace degenlab

#endif
