#ifndef DEGENLAB_SOLVER_HPP
#define DEGENLAB_SOLVER_HPP

#include <functional>
#include <utility>
#include <vector>

#include "degenlab/grid.hpp"

namespace degenlab {

using WeightFn = std::function<double(double x1, double r)>;

// A(u, phi) = int lambda |grad u|^{p-2} grad u . grad phi r^{d-2}, triangle sums.
// Exactly linear in phi; throws on mismatched grids.
double weak_residual(const GridField& u, const GridField& phi, const WeightFn& lambda, double p);

// (1/p) int lambda (|grad u|^2 + eps^2)^{p/2}; eps = 0 is the plain energy.
double energy(const GridField& u, const WeightFn& lambda, double p, double eps = 0.0);

struct SolveOptions {
    double grad_tol = 1e-11;  // vs the per-triangle gradient scale
    int max_iter = 40000;
    double eps_rel = 1e-8;  // regularization for p < 2, relative to the data scale
    int history_stride = 1;
};

struct SolveReport {
    // monotone subsequence of measured energies (machine-precision plateau
    // noise is not recorded)
    std::vector<double> energy_history;
    double final_residual = 0.0;
    double residual_scale = 0.0;
    int iterations = 0;
    bool converged = false;
    double epsilon = 0.0;  // regularization actually applied
};

struct DirichletProblem {
    const AxisymGrid* grid = nullptr;
    WeightFn lambda;  // sampled at triangle centroids
    double p = 2.0;
    std::function<double(double x1, double r)> boundary;
    SolveOptions opts;
};

// Minimizer of the strictly convex discrete energy by nonlinear CG with an
// Armijo-backtracked quadratic-interpolation line search.
std::pair<GridField, SolveReport> minimize_energy(const DirichletProblem& prob);

// max |A(u, e_k)| over free nodal hats, plus the scale used for convergence.
std::pair<double, double> nodal_residual_norm(const GridField& u, const WeightFn& lambda,
                                              double p, double eps = 0.0);

}  // namespace degenlab

#endif
