#ifndef DEGENLAB_GRID_HPP
#define DEGENLAB_GRID_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace degenlab {

enum class MaskKind { Ball, Annulus, Cylinder };
enum class NodeTag : std::uint8_t { Exterior = 0, Dirichlet = 1, Free = 2 };

// Uniform (x1, r) grid carrying the axisymmetric volume weight r^{d-2}. Each
// active cell is split into two axis-aligned right triangles with P1 (affine)
// gradients; both gradient components are single divided differences, so nodal
// truncation can only shrink them.
struct AxisymGrid {
    int nx = 0, nr = 0;
    double x1_min = 0, x1_max = 0, r_min = 0, r_max = 0;
    int d = 3;
    MaskKind mask = MaskKind::Cylinder;
    double inner = 0.0, outer = 1.0;  // full-radius bounds for Ball/Annulus

    double hx = 0, hr = 0;
    std::vector<NodeTag> tags;       // nx * nr
    std::vector<std::uint8_t> cell;  // (nx-1) * (nr-1), 1 = active

    // Ball of radius R about the origin; r-nodes offset half a cell off the axis.
    static AxisymGrid ball(int d, double R, double h);
    static AxisymGrid annulus(int d, double inner, double outer, double h);
    static AxisymGrid cylinder(int d, double x1_lo, double x1_hi, double r_lo, double r_hi,
                               int nx, int nr);

    int node(int ix, int j) const { return j * nx + ix; }
    double x1(int ix) const { return x1_min + ix * hx; }
    double r(int j) const { return r_min + j * hr; }
    int n_nodes() const { return nx * nr; }
    int n_cells() const { return (nx - 1) * (nr - 1); }
    bool cell_active(int cx, int j) const { return cell[j * (nx - 1) + cx] != 0; }
    NodeTag tag(int ix, int j) const { return tags[node(ix, j)]; }
    std::vector<int> free_nodes() const;

private:
    void finalize(const std::function<bool(double, double)>& inside);
};

struct GridField {
    const AxisymGrid* grid = nullptr;
    std::vector<double> values;

    explicit GridField(const AxisymGrid& g) : grid(&g), values(g.n_nodes(), 0.0) {}
    GridField() = default;
    double& at(int ix, int j) { return values[grid->node(ix, j)]; }
    double at(int ix, int j) const { return values[grid->node(ix, j)]; }

    // Evaluate pointwise (clamped bilinear interpolation).
    double interpolate(double x1, double r) const;
};

GridField sample_field(const AxisymGrid& g, const std::function<double(double, double)>& f);
GridField positive_part(const GridField& u);

// One triangle of an active cell. `lower` is (n00, n10, n11); the other is
// (n00, n01, n11).
struct TriRef {
    int i00, i10, i01, i11;
    bool lower;
    double cx1, cr;   // centroid
    double weight;    // sigma_{d-2} r_c^{d-2} hx hr / 2
    double inv_hx, inv_hr;

    double gx(const std::vector<double>& u) const {
        return lower ? (u[i10] - u[i00]) * inv_hx : (u[i11] - u[i01]) * inv_hx;
    }
    double gr(const std::vector<double>& u) const {
        return lower ? (u[i11] - u[i10]) * inv_hr : (u[i01] - u[i00]) * inv_hr;
    }
    double avg(const std::vector<double>& u) const {
        return (lower ? u[i00] + u[i10] + u[i11] : u[i00] + u[i01] + u[i11]) / 3.0;
    }
};

// Visit both triangles of every active cell.
void for_each_triangle(const AxisymGrid& g, const std::function<void(const TriRef&)>& f);

// Flat binary layout: int32 nx, nr; binary64 x1_min, x1_max, r_min, r_max;
// int32 d; then nodes row-major (r-major), little-endian binary64.
void save_field_binary(const GridField& u, const std::string& path);
struct LoadedField {
    AxisymGrid grid;
    std::vector<double> values;
};
LoadedField load_field_binary(const std::string& path);
void save_field_csv(const GridField& u, const std::string& path);

}  // namespace degenlab

#endif
