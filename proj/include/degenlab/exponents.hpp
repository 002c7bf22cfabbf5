#ifndef DEGENLAB_EXPONENTS_HPP
#define DEGENLAB_EXPONENTS_HPP

#include <string>
#include <vector>

namespace degenlab {

// Lebesgue integrability exponent in [1, inf]. Infinity is a distinct flag so
// that 1/s evaluates to an exact 0 instead of an IEEE special value.
class Exponent {
public:
    explicit Exponent(double value) : value_(value), infinite_(false) {}
    static Exponent infinity() { return Exponent(); }

    bool is_infinite() const { return infinite_; }
    double value() const { return value_; }  // +inf when infinite
    double inv() const { return infinite_ ? 0.0 : 1.0 / value_; }

private:
    Exponent();
    double value_;
    bool infinite_;
};

// The tuple (d, p, s, t): dimension, growth exponent, integrability of mu,
// integrability of 1/lambda.
struct ExponentConfig {
    int d;
    double p;
    Exponent s;
    Exponent t;

    // Throws std::invalid_argument naming the violated constraint.
    void validate() const;

    double inv_s() const { return s.inv(); }
    double inv_t() const { return t.inv(); }
    // Right-hand side of the admissibility condition 1/s + 1/t < p/(d-1).
    double critical_sum() const { return p / (d - 1); }
};

enum class Regime {
    TheoremAdmissible,      // 1/s + 1/t < p/(d-1): local boundedness guaranteed
    Critical,               // on the line, not covered by the counterexample
    CounterexampleCritical, // d>=3, p > 1+1/(d-2), 1/s+1/t >= p/(d-1), side condition
    CounterexampleStrict,   // d>=3, p <= 1+1/(d-2), 1/s+1/t >  p/(d-1), side condition
    Outside,                // beyond the line but not covered
};

const char* regime_name(Regime r);

struct Classification {
    Regime tag;
    std::vector<std::string> reasons;  // each predicate with its outcome
};

Classification classify(const ExponentConfig& cfg);

// Constants of the Moser iteration (Theorem local-boundedness path).
struct MoserConstants {
    double s_star;        // max{1, (1/p (1-1/s) + 1/(d-1))^-1}
    double delta;         // 1/s_star - (1/p)(1 + 1/t)
    double chi;           // 1 + delta
    double sup_exponent;  // exponent of Lambda in the sup bound: 1/(p delta)

    // (1/gamma) (s/(s-1)) (1 + 1/delta); requires s > 1.
    double corollary_exponent(double gamma) const;
    // (d/(alpha p)) ((1/t + 1/s)(1 + 1/delta) + 1 - 1/s)
    double kappa(double alpha) const;

    int d;
    double p;
    double inv_s;
    double inv_t;
};

// Requires a TheoremAdmissible configuration; refuses delta <= 0 with a
// diagnostic that reports delta.
MoserConstants moser_constants(const ExponentConfig& cfg);

// Constants of the unbounded-subsolution construction.
struct CounterexampleParams {
    double Q;       // profile decay exponent
    double C_Q;     // Q 2^{Q+1} / (2^Q - 1)
    double alpha0;  // minimal drift rate
};

// Requires d >= 3, p > 1.
CounterexampleParams counterexample_params(int d, double p);

// Weight interpolation parameter for a non-admissible pair, with the
// auxiliary critical-line exponents it was matched to (s_bar = s, t_bar = t
// when the pair lies exactly on the line).
struct ThetaSelection {
    double theta;
    double s_bar;
    double t_bar;
};

ThetaSelection theta_from_st(const ExponentConfig& cfg);

double pow2m1(double q);  // 2^q - 1, accurate for small q

}  // namespace degenlab

#endif
