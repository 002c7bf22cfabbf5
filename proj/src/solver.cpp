#include "degenlab/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace degenlab {

namespace {

struct Assembly {
    double energy = 0.0;
    double grad_scale = 0.0;  // largest single-triangle nodal contribution
};

// Energy and its nodal gradient in one pass. grad may be null.
Assembly assemble(const AxisymGrid& g, const std::vector<double>& u, const WeightFn& lambda,
                  double p, double eps, std::vector<double>* grad) {
    Assembly out;
    if (grad) grad->assign(u.size(), 0.0);
    const double e2 = eps * eps;
    for_each_triangle(g, [&](const TriRef& t) {
        const double lam = lambda(t.cx1, t.cr);
        const double gx = t.gx(u), gr = t.gr(u);
        const double G = gx * gx + gr * gr + e2;
        const double Gp2 = (p == 2.0) ? 1.0 : std::pow(G, 0.5 * p - 1.0);
        out.energy += lam * Gp2 * G * t.weight / p;
        const double q = lam * Gp2 * t.weight;
        out.grad_scale = std::max(out.grad_scale,
                                  lam * std::pow(G, 0.5 * (p - 1.0)) * t.weight *
                                      std::max(t.inv_hx, t.inv_hr));
        if (grad) {
            std::vector<double>& gv = *grad;
            if (t.lower) {
                gv[t.i00] -= q * gx * t.inv_hx;
                gv[t.i10] += q * (gx * t.inv_hx - gr * t.inv_hr);
                gv[t.i11] += q * gr * t.inv_hr;
            } else {
                gv[t.i01] += q * (-gx * t.inv_hx + gr * t.inv_hr);
                gv[t.i11] += q * gx * t.inv_hx;
                gv[t.i00] -= q * gr * t.inv_hr;
            }
        }
    });
    return out;
}

// phi'(t) and phi''(t) of the 1-D section t -> E(u + t dir); evaluating the
// derivative instead of energy differences keeps the line search at full
// precision near the minimizer.
std::pair<double, double> section_derivs(const AxisymGrid& g, const std::vector<double>& u,
                                         const std::vector<double>& dir, double t,
                                         const WeightFn& lambda, double p, double eps) {
    double d1 = 0.0, d2 = 0.0;
    const double e2 = eps * eps;
    for_each_triangle(g, [&](const TriRef& tr) {
        const double lam = lambda(tr.cx1, tr.cr);
        const double gx = tr.gx(u) + t * tr.gx(dir), gr = tr.gr(u) + t * tr.gr(dir);
        const double dx = tr.gx(dir), drr = tr.gr(dir);
        const double G = gx * gx + gr * gr + e2;
        const double dot = gx * dx + gr * drr;
        const double nd = dx * dx + drr * drr;
        const double Gp2 = (p == 2.0) ? 1.0 : std::pow(G, 0.5 * p - 1.0);
        d1 += lam * Gp2 * dot * tr.weight;
        const double curv = (p == 2.0) ? nd : (p - 2.0) * Gp2 / G * dot * dot + Gp2 * nd;
        d2 += lam * curv * tr.weight;
    });
    return {d1, d2};
}

}  // namespace

double weak_residual(const GridField& u, const GridField& phi, const WeightFn& lambda, double p) {
    if (u.grid != phi.grid) throw std::invalid_argument("weak_residual: mismatched grids");
    double acc = 0.0;
    for_each_triangle(*u.grid, [&](const TriRef& t) {
        const double gx = t.gx(u.values), gr = t.gr(u.values);
        const double G = gx * gx + gr * gr;
        const double m = (p == 2.0) ? 1.0 : (G > 0.0 ? std::pow(G, 0.5 * p - 1.0) : 0.0);
        acc += lambda(t.cx1, t.cr) * m * (gx * t.gx(phi.values) + gr * t.gr(phi.values)) * t.weight;
    });
    return acc;
}

double energy(const GridField& u, const WeightFn& lambda, double p, double eps) {
    return assemble(*u.grid, u.values, lambda, p, eps, nullptr).energy;
}

std::pair<double, double> nodal_residual_norm(const GridField& u, const WeightFn& lambda,
                                              double p, double eps) {
    std::vector<double> grad;
    const Assembly a = assemble(*u.grid, u.values, lambda, p, eps, &grad);
    double gmax = 0.0;
    for (int n = 0; n < u.grid->n_nodes(); ++n)
        if (u.grid->tags[n] == NodeTag::Free) gmax = std::max(gmax, std::abs(grad[n]));
    return {gmax, a.grad_scale};
}

std::pair<GridField, SolveReport> minimize_energy(const DirichletProblem& prob) {
    const AxisymGrid& g = *prob.grid;
    GridField u(g);
    SolveReport rep;

    double data_scale = 0.0;
    for (int j = 0; j < g.nr; ++j)
        for (int ix = 0; ix < g.nx; ++ix) {
            if (g.tag(ix, j) == NodeTag::Exterior) continue;
            const double b = prob.boundary(g.x1(ix), g.r(j));
            if (g.tag(ix, j) == NodeTag::Dirichlet) u.at(ix, j) = b;
            data_scale = std::max(data_scale, std::abs(b));
        }
    const double eps = (prob.p < 2.0) ? prob.opts.eps_rel * std::max(data_scale, 1.0) : 0.0;
    rep.epsilon = eps;

    const std::vector<int> free = g.free_nodes();
    if (free.empty()) {
        rep.converged = true;
        return {u, rep};
    }

    std::vector<double> grad, dir(u.values.size(), 0.0);
    Assembly a = assemble(g, u.values, prob.lambda, prob.p, eps, &grad);
    double E = a.energy;
    rep.energy_history.push_back(E);
    double g2 = 0.0;
    for (int n : free) g2 += grad[n] * grad[n];
    for (int n : free) dir[n] = -grad[n];
    double t_prev = 1.0;

    int it = 0;
    for (; it < prob.opts.max_iter; ++it) {
        double gmax = 0.0;
        for (int n : free) gmax = std::max(gmax, std::abs(grad[n]));
        rep.final_residual = gmax;
        rep.residual_scale = a.grad_scale;
        if (gmax <= prob.opts.grad_tol * std::max(a.grad_scale, 1e-300)) {
            rep.converged = true;
            break;
        }

        double slope = 0.0;
        for (int n : free) slope += grad[n] * dir[n];
        if (!(slope < 0.0)) {  // restart on a non-descent direction
            for (size_t n = 0; n < dir.size(); ++n) dir[n] = 0.0;
            for (int n : free) dir[n] = -grad[n];
            slope = -g2;
            if (!(slope < 0.0)) {
                rep.converged = true;
                break;
            }
        }

        // 1-D minimization along dir by Newton on phi'(t) with a sign bracket;
        // exact in one step for p = 2.
        auto derivs = [&](double t) {
            return section_derivs(g, u.values, dir, t, prob.lambda, prob.p, eps);
        };
        double t_lo = 0.0;  // phi'(t_lo) < 0
        double t_hi = -1.0;
        double t = (slope < 0.0 && t_prev > 0.0) ? t_prev : 1.0;
        {
            auto [d1, d2] = derivs(0.0);
            if (d2 > 0.0) t = std::max(-d1 / d2, 1e-30);
        }
        for (int ls = 0; ls < 60; ++ls) {
            auto [d1, d2] = derivs(t);
            if (std::abs(d1) <= 1e-12 * std::abs(slope) || (t_hi > 0.0 && t_hi - t_lo < 1e-12 * t_hi))
                break;
            if (d1 > 0.0)
                t_hi = t;
            else
                t_lo = t;
            double t_new = (d2 > 0.0) ? t - d1 / d2 : -1.0;
            if (t_hi > 0.0) {  // keep Newton inside the bracket
                if (!(t_new > t_lo && t_new < t_hi)) t_new = 0.5 * (t_lo + t_hi);
            } else {
                if (!(t_new > t)) t_new = 2.0 * t;  // expand until the slope flips
            }
            t = t_new;
        }
        if (!(t > 0.0)) {
            rep.converged = (gmax <= 1e3 * prob.opts.grad_tol * std::max(a.grad_scale, 1e-300));
            break;
        }
        for (int n : free) u.values[n] += t * dir[n];
        t_prev = t;
        if ((it + 1) % prob.opts.history_stride == 0) {
            E = assemble(g, u.values, prob.lambda, prob.p, eps, nullptr).energy;
            // plateau noise sits at machine precision; keep the history the
            // monotone subsequence of measured energies
            if (E <= rep.energy_history.back()) rep.energy_history.push_back(E);
        }

        std::vector<double> grad_new;
        a = assemble(g, u.values, prob.lambda, prob.p, eps, &grad_new);
        double g2_new = 0.0, gy = 0.0;
        for (int n : free) {
            g2_new += grad_new[n] * grad_new[n];
            gy += grad_new[n] * (grad_new[n] - grad[n]);
        }
        double beta = (it % 200 == 199) ? 0.0 : std::max(0.0, gy / g2);  // PR+
        for (int n : free) dir[n] = -grad_new[n] + beta * dir[n];
        grad.swap(grad_new);
        g2 = g2_new;
    }
    rep.iterations = it;
    E = assemble(g, u.values, prob.lambda, prob.p, eps, nullptr).energy;
    if (rep.energy_history.empty() || E <= rep.energy_history.back()) rep.energy_history.push_back(E);
    return {u, rep};
}

}  // namespace degenlab
