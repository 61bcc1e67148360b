#pragma once

#include "bouss/mesh.hpp"

#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bouss {

// One smooth piece of the a.e. derivative j'. Either a polynomial
// c0 + c1 s + c2 s^2 + ... or an exponential-decay primitive a + b exp(-c s).
struct PolyPiece {
    std::vector<double> coeffs;
};
struct ExpPiece {
    double a = 0.0, b = 0.0, c = 0.0;
};
using LawPiece = std::variant<PolyPiece, ExpPiece>;

double piece_value(const LawPiece& piece, double s);
double piece_slope(const LawPiece& piece, double s);

// Piecewise-C1 locally Lipschitz potential, described through its a.e.
// derivative j'. For symmetric laws the potential is even: pieces are given
// on [0, inf) over strictly positive breakpoints and j'(-s) = -j'(s).
struct PiecewiseLaw {
    std::string name;
    std::vector<double> breakpoints;  // sorted; strictly positive if symmetric
    std::vector<LawPiece> pieces;     // breakpoints.size() + 1 entries
    bool symmetric = false;
    // declared maximal descent slope standing in for a jump regularization;
    // without it a downward jump in j' means m1 = +inf
    std::optional<double> declared_descent;

    bool is_zero() const;
    // a.e. derivative away from breakpoints
    double dprime(double s) const;
    // one-sided limits of j' at s
    double limit_left(double s) const;
    double limit_right(double s) const;
    // breakpoints of the extended (possibly reflected) derivative graph
    std::vector<double> effective_breakpoints() const;
    void check_valid() const;  // throws std::invalid_argument
};

struct ClarkeInterval {
    double lo = 0.0, hi = 0.0;
};

// Clarke gradient of a scalar piecewise-C1 law: the hull of the one-sided
// derivative limits (a single point away from breakpoints).
ClarkeInterval eval_clarke(const PiecewiseLaw& law, double s);

// Normalized bump with support (-1,1): rho(x) = exp(-1/(1-x^2))/Z.
double mollifier_bump(double x);
// quadrature check of the scaled-mollifier mass, ~1 for every m
double mollifier_mass(int m);

class MollifiedLaw {
public:
    MollifiedLaw() = default;
    MollifiedLaw(PiecewiseLaw base, int level);

    // D j_m(s) = (rho_m * j')(s), adaptive Gauss quadrature split at the
    // breakpoints inside [s - 1/m, s + 1/m]
    double deriv(double s) const;

    const PiecewiseLaw& base() const { return base_; }
    int level() const { return level_; }
    double radius() const { return radius_; }
    bool is_zero() const { return base_.is_zero(); }

private:
    PiecewiseLaw base_;
    int level_ = 1;
    double radius_ = 1.0;
};

MollifiedLaw mollify(const PiecewiseLaw& law, int m);

struct LawConstants {
    double c0 = 0.0;  // growth: |eta| <= c0 (1 + |s|) for eta in dj(s)
    double m1 = 0.0;  // relaxed monotonicity (one-sided Lipschitz); +inf on jumps
    double range = 0.0;
    int grid = 0;
    bool descent_jump = false;  // law has a downward jump in j'
    bool finite() const { return m1 < std::numeric_limits<double>::infinity(); }
};

LawConstants estimate_constants(const PiecewiseLaw& law, double range, int grid);

// Heat conductivity k with H(k)-style bounds: k(r) > delta, bounded,
// Lipschitz. The declared bounds are verified by sampling in check().
struct ConductivitySpec {
    struct Constant {
        double value = 1.0;
    };
    struct OffsetSin {  // base + amplitude * sin(r)
        double base = 1.0, amplitude = 0.0;
    };
    struct ClippedPoly {  // clamp(poly(r), lo, hi)
        std::vector<double> coeffs;
        double lo = 0.0, hi = 1.0;
    };
    std::variant<Constant, OffsetSin, ClippedPoly> kind = Constant{};
    double delta = 0.0;      // declared lower bound
    double upper = 0.0;      // declared upper bound
    double lipschitz = 0.0;  // declared Lipschitz constant

    double value(double r) const;
    // samples k over [-range, range]; returns violation messages
    std::vector<std::string> check(double range = 50.0, int grid = 20001) const;
};

// Linear buoyancy F(theta) = beta * theta * e.
struct BuoyancySpec {
    Vec2 direction = Vec2(0.0, 1.0);
    double beta = 0.0;
    Vec2 apply(double theta) const { return beta * theta * direction; }
    double l2_operator_norm() const { return std::abs(beta) * direction.norm(); }
};

struct TraceNorms {
    double velocity = 0.0;     // ||gamma_s||: E -> L^2(Gamma1)^2, Korn energy
    double temperature = 0.0;  // ||gamma||: V -> L^2(Gamma1), full H^1 energy
    bool gamma1_empty = false;
};

struct H0Report {
    bool velocity_ok = false;
    bool thermal_ok = false;
    double velocity_margin = 0.0;  // alpha - max(2*sqrt(2)*c0, m1) * ||gamma_s||^2
    double thermal_margin = 0.0;   // delta - 2*sqrt(2)*c1 * ||gamma||^2
    // informational: margin without the paper's 2*sqrt(2) worst-case factor
    double velocity_margin_sharp = 0.0;
    double thermal_margin_sharp = 0.0;
    std::vector<std::string> notes;
    bool ok() const { return velocity_ok && thermal_ok; }
};

// The smallness condition: alpha > max{2*sqrt(2)*c0, m1} ||gamma_s||^2 and
// delta > 2*sqrt(2)*c1 ||gamma||^2, strict inequalities. The friction law's
// relaxed-monotonicity constant appears as "m" in the source hypothesis; it
// is read as m1 here and the report says so.
H0Report check_H0(const LawConstants& friction, const LawConstants& heat_flux, double alpha,
                  double delta, const TraceNorms& norms);

// Small catalog used by presets and tests.
PiecewiseLaw law_zero();
PiecewiseLaw law_abs();                     // j(s) = |s|
PiecewiseLaw law_quadratic(double a = 1.0); // j(s) = a s^2 / 2
// genuine static->kinetic jump at slip_onset (m1 = +inf): j' = mu_s on
// [0, s0), mu_k beyond
PiecewiseLaw law_stick_slip_jump(double mu_static, double mu_kinetic, double slip_onset);
// bounded-descent variant: linear ramp of width `width` between the levels
PiecewiseLaw law_stick_slip_ramp(double mu_static, double mu_kinetic, double slip_onset,
                                 double width);

}  // namespace bouss
