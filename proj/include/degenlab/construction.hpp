#ifndef DEGENLAB_CONSTRUCTION_HPP
#define DEGENLAB_CONSTRUCTION_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "degenlab/exponents.hpp"

namespace degenlab {

// Dyadic shell i covers [4^{-i-1}, 4^{-i}); the outer half is the power-law
// (LOG) branch, the inner half the quadratic (QUAD) branch.
enum class Branch { Log, Quad };

struct ShellPoint {
    int i;
    Branch branch;
    double r;
    double x1;
};

// Exact in binary floating point: all branch boundaries are powers of two.
ShellPoint locate_shell(double r, double x1 = 0.0);
bool at_branch_interface(double r);

struct EtaEntry {
    double eta;            // largest root of F_i in (0,1]
    double one_minus_eta;  // carried explicitly; ~4^{-2i}(i+1) for deep shells
    double rel_residual;   // |F_i(eta)| / max(|flux term|)
    double lower_bound;    // right-hand side of the applicable bound, NaN if none
    bool lower_bound_ok;
    bool multiple_roots;   // extra sign changes of F_i detected below the root
};

struct EtaTable {
    double alpha;
    int i_max;
    int j;  // first index from which the lower bounds and shell sign checks hold
    std::vector<EtaEntry> entries;  // indexed 0..i_max
};

struct CounterexampleSpec {
    int d;
    double p;
    double theta;
    double alpha;
    CounterexampleParams params;
    EtaTable etas;
    int j;
    double rho;  // 4^{-j}
    // Source integrability pair when built from an ExponentConfig (1/inf = 0).
    std::optional<double> inv_s;
    std::optional<double> inv_t;

    double eta(int i) const { return etas.entries.at(i).eta; }
    double one_minus_eta(int i) const { return etas.entries.at(i).one_minus_eta; }
};

// alpha < 0 means "use alpha0(d,p)". Builds the eta table, determines j and
// rho; throws if no j <= i_max certifies.
CounterexampleSpec make_counterexample(int d, double p, double theta,
                                       double alpha = -1.0, int i_max = 64);
// Same, with theta (and the recorded s,t) from theta_from_st(cfg).
CounterexampleSpec make_counterexample(const ExponentConfig& cfg,
                                       double alpha = -1.0, int i_max = 64);

// Flux-matching function of shell i; the largest root in (0,1] defines eta_i.
double flux_match_fn(int i, double eta, const CounterexampleSpec& spec);

// Piecewise weight on (0,1).
double omega_theta(double r, const CounterexampleSpec& spec);
double log_omega_theta(double r, const CounterexampleSpec& spec);
// Envelope bound that omega_theta satisfies branch-wise.
double omega_envelope(double r, const CounterexampleSpec& spec);

// Radial profile and derivatives; order in {0,1,2}. At an exact dyadic
// boundary the right-closed branch owns the point (derivatives jump there).
double phi_eval(double r, int order, const CounterexampleSpec& spec);

struct FieldValue {
    double v;
    double grad_axial, grad_radial;  // gradient of v in (x1, r) components
    double flux_axial, flux_radial;  // |grad v|^{p-2} grad v
};
FieldValue field_eval(double x1, double r, const CounterexampleSpec& spec);

struct DivergenceValue {
    double value;   // div(|grad v|^{p-2} grad v), may overflow to +-inf deep down
    double margin;  // bracket / (sum of absolute term magnitudes), scale-free
};
DivergenceValue shell_divergence(const ShellPoint& pt, const CounterexampleSpec& spec);

// Signed radial flux omega * |grad v|^{p-2} phi' with the e^{alpha(p-1)x1}
// factor dropped, in sign/log-magnitude form for deep shells.
struct SignedLog {
    int sign;       // -1, 0, +1
    double logmag;  // log of |value|, -inf for 0
    double value() const;
};
SignedLog radial_flux_one_sided(double gamma, bool from_below, const CounterexampleSpec& spec);

struct FluxJumpRow {
    int i;
    double gamma;
    bool matched_interface;  // gamma = half 4^{-i} (equality) vs 4^{-i} (jump)
    double left, right;      // flux values (log-domain difference re-exponentiated)
    double rel_mismatch;     // for matched interfaces
    bool ok;
};
struct FluxJumpReport {
    std::vector<FluxJumpRow> rows;
    bool all_ok;
};
// Checks every interface gamma in {4^{-i}, (1/2)4^{-i} : i in [i_lo, i_hi]}.
FluxJumpReport verify_flux_jumps(const CounterexampleSpec& spec, int i_lo, int i_hi,
                                 double match_rtol = 1e-10);

// Worst sampled divergence margin over a shell branch (pseudo-random interior
// samples, deterministic seed).
double min_divergence_margin(int i, Branch b, const CounterexampleSpec& spec, int n_samples);

// Axis-commutator integral of the weak-form limit argument: the k-th cutoff
// ramp lives on the LOG branch of shell k with |psi_k'| <= 4^{k+1}.
double mollified_residual(const CounterexampleSpec& spec, int k,
                          const std::function<double(double x1, double r)>& testfn);

// Point with v(x1, r) >= M; exact by construction: v(0, 4^{-i}) = i.
struct CertificatePoint {
    double x1, r, value;
};
CertificatePoint unboundedness_certificate(double M, const CounterexampleSpec& spec);

// Truncated field v_k: profile clamped to k on r <= 4^{-k} (zero slope there).
double phi_truncated(double r, int order, int k, const CounterexampleSpec& spec);

// Per-shell verification summary, one row per branch.
struct ShellVerifyRow {
    int i;
    Branch branch;
    double eta, rel_residual, lower_bound;
    bool lower_bound_ok;
    double min_div_margin;
    double flux_left, flux_right;
    double flux_rel_mismatch;  // NaN on jump interfaces
    double phi_jump;           // |phi(gamma-) - phi(gamma+)| at the inner boundary
    bool pass;
};
std::vector<ShellVerifyRow> verify_shells(const CounterexampleSpec& spec, int i_lo, int i_hi,
                                          int div_samples = 10000, double div_tol = 1e-9,
                                          double flux_rtol = 1e-10, double phi_tol = 1e-12);

}  // namespace degenlab

#endif
