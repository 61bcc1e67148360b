#include "bouss/laws.hpp"

#include "bouss/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace bouss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double gl_integrate(const std::function<double(double)>& f, double a, double b, int n) {
    static const std::vector<QuadPoint1D> rule12 = gauss_legendre(12);
    static const std::vector<QuadPoint1D> rule24 = gauss_legendre(24);
    const auto& rule = (n <= 12) ? rule12 : rule24;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (const auto& q : rule) s += q.w * f(mid + half * q.x);
    return s * half;
}

double adaptive_gl(const std::function<double(double)>& f, double a, double b, double tol,
                   int depth = 0) {
    const double coarse = gl_integrate(f, a, b, 12);
    const double fine = gl_integrate(f, a, b, 24);
    const double err = std::abs(fine - coarse);
    // the relative floor stops the recursion once roundoff dominates
    if (err <= tol + 1e-14 * std::abs(fine) || depth >= 24) return fine;
    const double mid = 0.5 * (a + b);
    return adaptive_gl(f, a, mid, 0.5 * tol, depth + 1) +
           adaptive_gl(f, mid, b, 0.5 * tol, depth + 1);
}

double bump_raw(double x) {
    const double t = 1.0 - x * x;
    if (t <= 0.0) return 0.0;
    return std::exp(-1.0 / t);
}

double bump_normalization() {
    static const double z = adaptive_gl([](double x) { return bump_raw(x); }, -1.0, 1.0, 1e-16);
    return z;
}

}  // namespace

double piece_value(const LawPiece& piece, double s) {
    if (std::holds_alternative<PolyPiece>(piece)) {
        const auto& coeffs = std::get<PolyPiece>(piece).coeffs;
        double v = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * s + *it;
        return v;
    }
    const auto& e = std::get<ExpPiece>(piece);
    return e.a + e.b * std::exp(-e.c * s);
}

double piece_slope(const LawPiece& piece, double s) {
    if (std::holds_alternative<PolyPiece>(piece)) {
        const auto& coeffs = std::get<PolyPiece>(piece).coeffs;
        double v = 0.0;
        for (size_t k = coeffs.size(); k-- > 1;) v = v * s + coeffs[k] * static_cast<double>(k);
        return v;
    }
    const auto& e = std::get<ExpPiece>(piece);
    return -e.b * e.c * std::exp(-e.c * s);
}

bool PiecewiseLaw::is_zero() const {
    for (const auto& p : pieces) {
        if (std::holds_alternative<PolyPiece>(p)) {
            for (double c : std::get<PolyPiece>(p).coeffs)
                if (c != 0.0) return false;
        } else {
            const auto& e = std::get<ExpPiece>(p);
            if (e.a != 0.0 || e.b != 0.0) return false;
        }
    }
    return true;
}

void PiecewiseLaw::check_valid() const {
    if (pieces.size() != breakpoints.size() + 1)
        throw std::invalid_argument("law '" + name + "': need breakpoints+1 pieces");
    for (size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i - 1] < breakpoints[i]))
            throw std::invalid_argument("law '" + name + "': breakpoints not strictly sorted");
    if (symmetric)
        for (double b : breakpoints)
            if (!(b > 0.0))
                throw std::invalid_argument("law '" + name +
                                            "': symmetric laws need positive breakpoints");
}

double PiecewiseLaw::dprime(double s) const {
    if (symmetric && s < 0.0) return -dprime(-s);
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), s);
    return piece_value(pieces[static_cast<size_t>(it - breakpoints.begin())], s);
}

double PiecewiseLaw::limit_right(double s) const {
    if (symmetric && s < 0.0) return -limit_left(-s);
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), s);
    return piece_value(pieces[static_cast<size_t>(it - breakpoints.begin())], s);
}

double PiecewiseLaw::limit_left(double s) const {
    if (symmetric) {
        if (s < 0.0) return -limit_right(-s);
        if (s == 0.0) return -limit_right(0.0);
    }
    const auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), s);
    return piece_value(pieces[static_cast<size_t>(it - breakpoints.begin())], s);
}

std::vector<double> PiecewiseLaw::effective_breakpoints() const {
    std::vector<double> pts;
    if (symmetric) {
        for (auto it = breakpoints.rbegin(); it != breakpoints.rend(); ++it) pts.push_back(-*it);
        pts.push_back(0.0);
    }
    pts.insert(pts.end(), breakpoints.begin(), breakpoints.end());
    return pts;
}

ClarkeInterval eval_clarke(const PiecewiseLaw& law, double s) {
    for (double b : law.effective_breakpoints()) {
        if (std::abs(s - b) <= 1e-14 * std::max(1.0, std::abs(b))) {
            const double l = law.limit_left(b), r = law.limit_right(b);
            return {std::min(l, r), std::max(l, r)};
        }
    }
    const double v = law.dprime(s);
    return {v, v};
}

double mollifier_bump(double x) { return bump_raw(x) / bump_normalization(); }

double mollifier_mass(int m) {
    const double r = 1.0 / m;
    return adaptive_gl([m](double z) { return m * mollifier_bump(m * z); }, -r, r, 1e-14);
}

MollifiedLaw::MollifiedLaw(PiecewiseLaw base, int level)
    : base_(std::move(base)), level_(level), radius_(1.0 / level) {
    if (level < 1) throw std::invalid_argument("mollify: level must be >= 1");
    base_.check_valid();
}

double MollifiedLaw::deriv(double s) const {
    if (base_.is_zero()) return 0.0;
    if (s == 0.0 && base_.symmetric) return 0.0;  // odd j' against the even bump
    const double r = radius_;
    // integrate rho_m(s - z) j'(z) over z in [s-r, s+r], split where j' kinks
    std::vector<double> cuts{s - r, s + r};
    for (double b : base_.effective_breakpoints())
        if (b > s - r && b < s + r) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    const double m = static_cast<double>(level_);
    auto integrand = [&](double z) { return m * mollifier_bump(m * (s - z)) * base_.dprime(z); };
    const double tol = 1e-13 * (1.0 + std::abs(s));
    double total = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] < 1e-300) continue;
        total += adaptive_gl(integrand, cuts[i], cuts[i + 1], tol);
    }
    return total;
}

MollifiedLaw mollify(const PiecewiseLaw& law, int m) { return MollifiedLaw(law, m); }

LawConstants estimate_constants(const PiecewiseLaw& law, double range, int grid) {
    law.check_valid();
    if (!(range > 0.0) || grid < 2) throw std::invalid_argument("estimate_constants: degenerate grid");

    LawConstants out;
    out.range = range;
    out.grid = grid;

    std::vector<double> samples;
    samples.reserve(static_cast<size_t>(grid) + 8);
    for (int i = 0; i < grid; ++i)
        samples.push_back(-range + 2.0 * range * i / (grid - 1));
    const auto bps = law.effective_breakpoints();
    for (double b : bps)
        if (b >= -range && b <= range) samples.push_back(b);

    double c0 = 0.0;
    for (double s : samples) {
        const auto iv = eval_clarke(law, s);
        c0 = std::max(c0, std::max(std::abs(iv.lo), std::abs(iv.hi)) / (1.0 + std::abs(s)));
    }
    out.c0 = c0;

    // relaxed monotonicity: the maximal descent of the graph of j'.
    // smooth pieces contribute their steepest negative slope (analytic),
    // downward jumps make m1 = +inf unless a bounded-descent slope was
    // declared for the regularized law.
    double m1 = 0.0;
    auto scan_piece = [&](const LawPiece& piece, double lo, double hi) {
        lo = std::max(lo, -range);
        hi = std::min(hi, range);
        if (!(lo < hi)) return;
        const int n = std::max(64, grid / std::max(1, static_cast<int>(law.pieces.size())));
        for (int i = 0; i <= n; ++i) {
            const double s = lo + (hi - lo) * i / n;
            m1 = std::max(m1, -piece_slope(piece, s));
        }
    };
    // piece intervals on the native (nonnegative if symmetric) axis; the odd
    // extension has the same slope profile, so scanning one side is enough
    {
        double lo = law.symmetric ? 0.0 : -range;
        for (size_t i = 0; i < law.pieces.size(); ++i) {
            const double hi = (i < law.breakpoints.size()) ? law.breakpoints[i] : range;
            scan_piece(law.pieces[i], lo, std::min(hi, range));
            lo = hi;
        }
    }
    for (double b : bps) {
        if (b < -range || b > range) continue;
        const double l = law.limit_left(b), r = law.limit_right(b);
        if (r < l - 1e-12 * (1.0 + std::abs(l) + std::abs(r))) {
            out.descent_jump = true;
            if (law.declared_descent)
                m1 = std::max(m1, *law.declared_descent);
            else
                m1 = kInf;
        }
    }
    out.m1 = m1;
    return out;
}

double ConductivitySpec::value(double r) const {
    if (std::holds_alternative<Constant>(kind)) return std::get<Constant>(kind).value;
    if (std::holds_alternative<OffsetSin>(kind)) {
        const auto& k = std::get<OffsetSin>(kind);
        return k.base + k.amplitude * std::sin(r);
    }
    const auto& k = std::get<ClippedPoly>(kind);
    double v = 0.0;
    for (auto it = k.coeffs.rbegin(); it != k.coeffs.rend(); ++it) v = v * r + *it;
    return std::clamp(v, k.lo, k.hi);
}

std::vector<std::string> ConductivitySpec::check(double range, int grid) const {
    std::vector<std::string> bad;
    if (!(delta > 0.0)) bad.push_back("conductivity: delta must be positive (H(k): k(r) > delta)");
    double prev = value(-range);
    const double h = 2.0 * range / (grid - 1);
    double minv = prev, maxv = prev, maxslope = 0.0;
    for (int i = 1; i < grid; ++i) {
        const double r = -range + h * i;
        const double v = value(r);
        minv = std::min(minv, v);
        maxv = std::max(maxv, v);
        maxslope = std::max(maxslope, std::abs(v - prev) / h);
        prev = v;
    }
    if (!(minv > delta))
        bad.push_back("conductivity: sampled minimum " + std::to_string(minv) +
                      " does not exceed delta (H(k): k(r) > delta)");
    if (upper > 0.0 && maxv > upper * (1.0 + 1e-12))
        bad.push_back("conductivity: sampled maximum exceeds the declared upper bound");
    if (lipschitz > 0.0 && maxslope > lipschitz * (1.0 + 1e-6))
        bad.push_back("conductivity: sampled slope exceeds the declared Lipschitz constant");
    return bad;
}

H0Report check_H0(const LawConstants& friction, const LawConstants& heat_flux, double alpha,
                  double delta, const TraceNorms& norms) {
    H0Report rep;
    const double two_sqrt2 = 2.0 * std::sqrt(2.0);
    const double gs2 = norms.velocity * norms.velocity;
    const double g2 = norms.temperature * norms.temperature;

    const double vel_threshold = std::max(two_sqrt2 * friction.c0, friction.m1) * gs2;
    rep.velocity_margin = alpha - vel_threshold;
    rep.velocity_ok = alpha > vel_threshold;

    const double th_threshold = two_sqrt2 * heat_flux.c0 * g2;
    rep.thermal_margin = delta - th_threshold;
    rep.thermal_ok = delta > th_threshold;

    // coefficients as they enter the discrete energy bound
    rep.velocity_margin_sharp =
        std::min(0.5 * alpha - std::sqrt(2.0) * friction.c0 * gs2, alpha - friction.m1 * gs2);
    rep.thermal_margin_sharp = 0.5 * delta - std::sqrt(2.0) * heat_flux.c0 * g2;

    rep.notes.push_back(
        "the relaxed-monotonicity constant is written both m and m1 in the hypotheses; "
        "both are read as m1 here");
    if (!friction.finite())
        rep.notes.push_back("friction m1 = +inf (downward jump in j'); the velocity condition "
                            "cannot hold");
    if (norms.gamma1_empty)
        rep.notes.push_back("gamma1 is empty: trace norms are zero and the condition is vacuous");
    return rep;
}

PiecewiseLaw law_zero() {
    PiecewiseLaw law;
    law.name = "zero";
    law.pieces = {PolyPiece{{0.0}}};
    return law;
}

PiecewiseLaw law_abs() {
    PiecewiseLaw law;
    law.name = "abs";
    law.symmetric = true;
    law.pieces = {PolyPiece{{1.0}}};
    return law;
}

PiecewiseLaw law_quadratic(double a) {
    PiecewiseLaw law;
    law.name = "quadratic";
    law.symmetric = true;  // even potential, odd derivative
    law.pieces = {PolyPiece{{0.0, a}}};
    return law;
}

PiecewiseLaw law_stick_slip_jump(double mu_static, double mu_kinetic, double slip_onset) {
    PiecewiseLaw law;
    law.name = "stick_slip_jump";
    law.symmetric = true;
    law.breakpoints = {slip_onset};
    law.pieces = {PolyPiece{{mu_static}}, PolyPiece{{mu_kinetic}}};
    return law;
}

PiecewiseLaw law_stick_slip_ramp(double mu_static, double mu_kinetic, double slip_onset,
                                 double width) {
    PiecewiseLaw law;
    law.name = "stick_slip_ramp";
    law.symmetric = true;
    law.breakpoints = {slip_onset, slip_onset + width};
    const double slope = (mu_kinetic - mu_static) / width;
    law.pieces = {PolyPiece{{mu_static}}, PolyPiece{{mu_static - slope * slip_onset, slope}},
                  PolyPiece{{mu_kinetic}}};
    return law;
}

}  // namespace bouss
