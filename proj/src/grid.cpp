#include "degenlab/grid.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "degenlab/numerics.hpp"

namespace degenlab {

void AxisymGrid::finalize(const std::function<bool(double, double)>& inside) {
    tags.assign(nx * nr, NodeTag::Exterior);
    cell.assign((nx - 1) * (nr - 1), 0);
    std::vector<std::uint8_t> node_in(nx * nr, 0);
    for (int j = 0; j < nr; ++j)
        for (int ix = 0; ix < nx; ++ix) node_in[node(ix, j)] = inside(x1(ix), r(j)) ? 1 : 0;
    for (int j = 0; j + 1 < nr; ++j)
        for (int cx = 0; cx + 1 < nx; ++cx) {
            const bool act = node_in[node(cx, j)] && node_in[node(cx + 1, j)] &&
                             node_in[node(cx, j + 1)] && node_in[node(cx + 1, j + 1)];
            cell[j * (nx - 1) + cx] = act ? 1 : 0;
        }
    // A node is free when every index-feasible incident cell is active and it
    // is not on the x1-extremal columns or the outer r row. The axis row j = 0
    // has no cells below by geometry, which is the natural no-flux closure.
    for (int j = 0; j < nr; ++j)
        for (int ix = 0; ix < nx; ++ix) {
            if (!node_in[node(ix, j)]) continue;
            bool touches = false, all_active = true;
            for (int dj = -1; dj <= 0; ++dj)
                for (int dxi = -1; dxi <= 0; ++dxi) {
                    const int cx = ix + dxi, cj = j + dj;
                    if (cx < 0 || cj < 0 || cx >= nx - 1 || cj >= nr - 1) continue;
                    touches = true;
                    all_active = all_active && cell_active(cx, cj);
                }
            if (!touches) continue;  // isolated node
            const bool border = (ix == 0) || (ix == nx - 1) || (j == nr - 1);
            tags[node(ix, j)] = (all_active && !border) ? NodeTag::Free : NodeTag::Dirichlet;
        }
}

AxisymGrid AxisymGrid::ball(int d, double R, double h) {
    AxisymGrid g;
    g.d = d;
    g.mask = MaskKind::Ball;
    g.inner = 0.0;
    g.outer = R;
    g.hx = h;
    g.hr = h;
    const int nhalf = static_cast<int>(std::ceil(R / h));
    g.nx = 2 * nhalf + 1;
    g.x1_min = -nhalf * h;
    g.x1_max = nhalf * h;
    g.nr = nhalf + 1;
    g.r_min = 0.5 * h;  // axis offset
    g.r_max = g.r_min + (g.nr - 1) * h;
    g.finalize([&](double x, double rr) { return x * x + rr * rr <= R * R * (1.0 + 1e-12); });
    return g;
}

AxisymGrid AxisymGrid::annulus(int d, double inner, double outer, double h) {
    if (!(0.0 < inner && inner < outer)) throw std::invalid_argument("annulus: 0 < inner < outer");
    AxisymGrid g;
    g.d = d;
    g.mask = MaskKind::Annulus;
    g.inner = inner;
    g.outer = outer;
    g.hx = h;
    g.hr = h;
    const int nhalf = static_cast<int>(std::ceil(outer / h));
    g.nx = 2 * nhalf + 1;
    g.x1_min = -nhalf * h;
    g.x1_max = nhalf * h;
    g.nr = nhalf + 1;
    g.r_min = 0.5 * h;
    g.r_max = g.r_min + (g.nr - 1) * h;
    g.finalize([&](double x, double rr) {
        const double q = x * x + rr * rr;
        return q >= inner * inner * (1.0 - 1e-12) && q <= outer * outer * (1.0 + 1e-12);
    });
    return g;
}

AxisymGrid AxisymGrid::cylinder(int d, double x1_lo, double x1_hi, double r_lo, double r_hi,
                                int nx, int nr) {
    if (!(x1_hi > x1_lo) || !(r_hi > r_lo) || !(r_lo > 0.0) || nx < 2 || nr < 2)
        throw std::invalid_argument("cylinder: bad extents");
    AxisymGrid g;
    g.d = d;
    g.mask = MaskKind::Cylinder;
    g.inner = r_lo;
    g.outer = r_hi;
    g.nx = nx;
    g.nr = nr;
    g.x1_min = x1_lo;
    g.x1_max = x1_hi;
    g.r_min = r_lo;
    g.r_max = r_hi;
    g.hx = (x1_hi - x1_lo) / (nx - 1);
    g.hr = (r_hi - r_lo) / (nr - 1);
    g.finalize([](double, double) { return true; });
    // all four sides of the rectangle are Dirichlet (including the inner r row:
    // a cylinder never touches the axis)
    for (int ix = 0; ix < g.nx; ++ix) {
        g.tags[g.node(ix, 0)] = NodeTag::Dirichlet;
        g.tags[g.node(ix, g.nr - 1)] = NodeTag::Dirichlet;
    }
    return g;
}

std::vector<int> AxisymGrid::free_nodes() const {
    std::vector<int> out;
    for (int n = 0; n < n_nodes(); ++n)
        if (tags[n] == NodeTag::Free) out.push_back(n);
    return out;
}

double GridField::interpolate(double x1q, double rq) const {
    const AxisymGrid& g = *grid;
    double fx = (x1q - g.x1_min) / g.hx;
    double fr = (rq - g.r_min) / g.hr;
    fx = std::min(std::max(fx, 0.0), double(g.nx - 1) - 1e-12);
    fr = std::min(std::max(fr, 0.0), double(g.nr - 1) - 1e-12);
    const int ix = static_cast<int>(fx), j = static_cast<int>(fr);
    const double ax = fx - ix, ar = fr - j;
    return (1 - ax) * (1 - ar) * at(ix, j) + ax * (1 - ar) * at(ix + 1, j) +
           (1 - ax) * ar * at(ix, j + 1) + ax * ar * at(ix + 1, j + 1);
}

GridField sample_field(const AxisymGrid& g, const std::function<double(double, double)>& f) {
    GridField u(g);
    for (int j = 0; j < g.nr; ++j)
        for (int ix = 0; ix < g.nx; ++ix) u.at(ix, j) = f(g.x1(ix), g.r(j));
    return u;
}

GridField positive_part(const GridField& u) {
    GridField v = u;
    for (double& x : v.values) x = std::max(x, 0.0);
    return v;
}

void for_each_triangle(const AxisymGrid& g, const std::function<void(const TriRef&)>& f) {
    const double sig = sphere_area(g.d - 2);
    const double base = 0.5 * g.hx * g.hr * sig;
    for (int j = 0; j + 1 < g.nr; ++j)
        for (int cx = 0; cx + 1 < g.nx; ++cx) {
            if (!g.cell_active(cx, j)) continue;
            TriRef t;
            t.i00 = g.node(cx, j);
            t.i10 = g.node(cx + 1, j);
            t.i01 = g.node(cx, j + 1);
            t.i11 = g.node(cx + 1, j + 1);
            t.inv_hx = 1.0 / g.hx;
            t.inv_hr = 1.0 / g.hr;
            const double x0 = g.x1(cx), r0 = g.r(j);
            t.lower = true;
            t.cx1 = x0 + 2.0 * g.hx / 3.0;
            t.cr = r0 + g.hr / 3.0;
            t.weight = base * std::pow(t.cr, g.d - 2);
            f(t);
            t.lower = false;
            t.cx1 = x0 + g.hx / 3.0;
            t.cr = r0 + 2.0 * g.hr / 3.0;
            t.weight = base * std::pow(t.cr, g.d - 2);
            f(t);
        }
}

void save_field_binary(const GridField& u, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw std::runtime_error("save_field_binary: cannot open " + path);
    const AxisymGrid& g = *u.grid;
    const std::int32_t head_i[2] = {g.nx, g.nr};
    const double head_d[4] = {g.x1_min, g.x1_max, g.r_min, g.r_max};
    const std::int32_t dd = g.d;
    std::fwrite(head_i, sizeof(std::int32_t), 2, fp);
    std::fwrite(head_d, sizeof(double), 4, fp);
    std::fwrite(&dd, sizeof(std::int32_t), 1, fp);
    std::fwrite(u.values.data(), sizeof(double), u.values.size(), fp);
    std::fclose(fp);
}

LoadedField load_field_binary(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw std::runtime_error("load_field_binary: cannot open " + path);
    std::int32_t head_i[2];
    double head_d[4];
    std::int32_t dd;
    if (std::fread(head_i, sizeof(std::int32_t), 2, fp) != 2 ||
        std::fread(head_d, sizeof(double), 4, fp) != 4 ||
        std::fread(&dd, sizeof(std::int32_t), 1, fp) != 1) {
        std::fclose(fp);
        throw std::runtime_error("load_field_binary: truncated header in " + path);
    }
    LoadedField out;
    out.grid = AxisymGrid::cylinder(dd, head_d[0], head_d[1], head_d[2], head_d[3], head_i[0], head_i[1]);
    out.values.resize(std::size_t(head_i[0]) * head_i[1]);
    const std::size_t got = std::fread(out.values.data(), sizeof(double), out.values.size(), fp);
    std::fclose(fp);
    if (got != out.values.size()) throw std::runtime_error("load_field_binary: truncated payload in " + path);
    return out;
}

void save_field_csv(const GridField& u, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("save_field_csv: cannot open " + path);
    std::fprintf(fp, "# degenlab-csv v1\nx1,r,value,tag\n");
    const AxisymGrid& g = *u.grid;
    for (int j = 0; j < g.nr; ++j)
        for (int ix = 0; ix < g.nx; ++ix)
            std::fprintf(fp, "%.17g,%.17g,%.17g,%d\n", g.x1(ix), g.r(j), u.at(ix, j),
                         int(g.tag(ix, j)));
    std::fclose(fp);
}

}  // namespace degenlab
