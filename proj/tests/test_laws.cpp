#include "bouss/laws.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace bouss;

namespace {

// direct-convolution oracle: composite Simpson of m rho(m(s-z)) j'(z), split
// at the kinks of j', with its own bump normalization; independent of the
// adaptive path
double conv_oracle(const PiecewiseLaw& law, int m, double s, int n = 40000) {
    auto bump_raw = [](double x) {
        const double t = 1.0 - x * x;
        return t > 0.0 ? std::exp(-1.0 / t) : 0.0;
    };
    static double z_norm = 0.0;
    if (z_norm == 0.0) {
        const int nn = 2000000;
        double acc = 0.0;
        for (int i = 0; i <= nn; ++i) {
            const double x = -1.0 + 2.0 * i / nn;
            const double w = (i == 0 || i == nn) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            acc += w * bump_raw(x);
        }
        z_norm = acc * (2.0 / nn) / 3.0;
    }
    std::vector<double> cuts{s - 1.0 / m, s + 1.0 / m};
    for (double b : law.effective_breakpoints())
        if (b > cuts.front() && b < cuts.back()) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
        const double a = cuts[seg], b = cuts[seg + 1];
        double acc = 0.0;
        for (int i = 0; i <= n; ++i) {
            const double z = a + (b - a) * i / n;
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            // one-sided limits at the segment ends (j' may jump there)
            const double jp = (i == 0) ? law.limit_right(z)
                                       : (i == n) ? law.limit_left(z) : law.dprime(z);
            acc += w * m * (bump_raw(m * (s - z)) / z_norm) * jp;
        }
        total += acc * ((b - a) / n) / 3.0;
    }
    return total;
}

}  // namespace

TEST_CASE("clarke gradient of |s|") {
    const auto law = law_abs();
    const auto at0 = eval_clarke(law, 0.0);
    CHECK(at0.lo == doctest::Approx(-1.0));
    CHECK(at0.hi == doctest::Approx(1.0));
    const auto at2 = eval_clarke(law, 2.0);
    CHECK(at2.lo == doctest::Approx(1.0));
    CHECK(at2.hi == doctest::Approx(1.0));
    const auto atm3 = eval_clarke(law, -3.0);
    CHECK(atm3.lo == doctest::Approx(-1.0));
    CHECK(atm3.hi == doctest::Approx(-1.0));
}

TEST_CASE("clarke gradient at the stick-slip jump is the hull of the limits") {
    const auto law = law_stick_slip_jump(0.5, 0.2, 1.0);
    const auto iv = eval_clarke(law, 1.0);
    CHECK(iv.lo == doctest::Approx(0.2));
    CHECK(iv.hi == doctest::Approx(0.5));
    const auto at_neg = eval_clarke(law, -1.0);  // odd extension
    CHECK(at_neg.lo == doctest::Approx(-0.5));
    CHECK(at_neg.hi == doctest::Approx(-0.2));
}

TEST_CASE("mollifier bump is normalized") {
    // int_{-1}^{1} exp(-1/(1-x^2)) dx, high-precision reference
    CHECK(mollifier_bump(0.0) == doctest::Approx(std::exp(-1.0) / 0.44399381616807944).epsilon(1e-12));
    for (int m : {1, 2, 8, 32}) CHECK(mollifier_mass(m) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(mollifier_bump(1.0) == 0.0);
    CHECK(mollifier_bump(-1.2) == 0.0);
}

TEST_CASE("mollified |s| is odd, zero at 0, and exactly 1 past the support") {
    for (int m : {1, 4, 16}) {
        const auto jm = mollify(law_abs(), m);
        CHECK(jm.deriv(0.0) == 0.0);
        CHECK(jm.deriv(1.0 / m) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(jm.deriv(2.0 / m) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(jm.deriv(-2.0 / m) == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(jm.deriv(0.5 / m) == doctest::Approx(-jm.deriv(-0.5 / m)).epsilon(1e-12));
    }
    // frozen reference from an independent high-precision quadrature
    const auto jm4 = mollify(law_abs(), 4);
    CHECK(jm4.deriv(0.125) == doctest::Approx(0.754065433445341844).epsilon(1e-10));
}

TEST_CASE("mollified quadratic law keeps its linear derivative") {
    const auto law = law_quadratic(1.0);
    for (int m : {1, 8}) {
        const auto jm = mollify(law, m);
        CHECK(jm.deriv(0.0) == 0.0);
        for (double s : {0.3, -0.7, 2.5}) {
            CHECK(jm.deriv(s) == doctest::Approx(s).epsilon(1e-8));
            CHECK(jm.deriv(s) == doctest::Approx(conv_oracle(law, m, s)).epsilon(1e-7));
        }
    }
}

TEST_CASE("mollified stick-slip ramp matches the direct convolution oracle") {
    const auto law = law_stick_slip_ramp(0.05, 0.02, 0.1, 0.2);
    const auto jm = mollify(law, 8);
    CHECK(jm.deriv(0.15) == doctest::Approx(0.041905873013667663).epsilon(1e-9));
    for (double s : {0.05, 0.12, 0.31, -0.2, 1.0})
        CHECK(jm.deriv(s) == doctest::Approx(conv_oracle(law, 8, s)).epsilon(1e-7));
}

TEST_CASE("mollified derivative stays within the Clarke hull of a neighborhood") {
    const auto laws = {law_abs(), law_stick_slip_jump(0.5, 0.2, 1.0),
                       law_stick_slip_ramp(0.05, 0.02, 0.1, 0.2)};
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (const auto& law : laws) {
        for (int m : {2, 8}) {
            const auto jm = mollify(law, m);
            for (int trial = 0; trial < 200; ++trial) {
                const double s = dist(rng);
                const double d = jm.deriv(s);
                // hull over [s - 1/m, s + 1/m], sampled
                double lo = 1e300, hi = -1e300;
                for (int i = 0; i <= 64; ++i) {
                    const double z = s - 1.0 / m + 2.0 / m * i / 64.0;
                    const auto iv = eval_clarke(law, z);
                    lo = std::min(lo, iv.lo);
                    hi = std::max(hi, iv.hi);
                }
                CHECK(d >= lo - 1e-8);
                CHECK(d <= hi + 1e-8);
            }
        }
    }
}

TEST_CASE("growth bound survives mollification at many samples") {
    const auto law = law_stick_slip_ramp(0.05, 0.02, 0.1, 0.2);
    const auto constants = estimate_constants(law, 10.0, 2001);
    for (int m : {1, 8}) {
        const auto jm = mollify(law, m);
        std::mt19937 rng(99);
        std::uniform_real_distribution<double> dist(-9.0, 9.0);
        for (int i = 0; i < 10000; ++i) {
            const double s = dist(rng);
            CHECK(std::abs(jm.deriv(s)) <=
                  constants.c0 * (1.0 + std::abs(s) + 1.0 / m) + 1e-10);
        }
    }
}

TEST_CASE("doubling m shrinks the smooth-region deviation monotonically") {
    const auto law = law_stick_slip_ramp(0.05, 0.02, 0.5, 0.5);
    double prev = 1e300;
    for (int m : {2, 4, 8, 16}) {
        const auto jm = mollify(law, m);
        double dev = 0.0;
        for (int i = 0; i <= 50; ++i) {
            // stay a distance 1/2 (> 1/m for all tested m) from the kinks
            const double s = 2.0 + i * 0.02;
            dev = std::max(dev, std::abs(jm.deriv(s) - law.dprime(s)));
        }
        CHECK(dev <= prev + 1e-12);
        prev = dev;
    }
}

TEST_CASE("estimated constants for the catalog") {
    SUBCASE("|s| has c0 = 1 and m1 = 0") {
        const auto c = estimate_constants(law_abs(), 10.0, 2001);
        CHECK(c.c0 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(c.m1 == 0.0);
        CHECK(!c.descent_jump);
    }
    SUBCASE("s^2/2 on [-10,10] has c0 = 10/11 and m1 = 0") {
        const auto c = estimate_constants(law_quadratic(1.0), 10.0, 2001);
        CHECK(c.c0 == doctest::Approx(10.0 / 11.0).epsilon(1e-12));
        CHECK(c.m1 == 0.0);
    }
    SUBCASE("genuine downward jump means m1 = +inf unless declared") {
        const auto c = estimate_constants(law_stick_slip_jump(0.5, 0.2, 1.0), 10.0, 2001);
        CHECK(c.descent_jump);
        CHECK(!c.finite());

        auto declared = law_stick_slip_jump(0.5, 0.2, 1.0);
        declared.declared_descent = 3.0;
        const auto cd = estimate_constants(declared, 10.0, 2001);
        CHECK(cd.m1 == doctest::Approx(3.0));
    }
    SUBCASE("bounded-descent ramp certifies its slope") {
        const auto c = estimate_constants(law_stick_slip_ramp(0.05, 0.02, 0.1, 0.2), 10.0, 2001);
        CHECK(c.c0 == doctest::Approx(0.05).epsilon(1e-10));
        CHECK(c.m1 == doctest::Approx(0.15).epsilon(1e-10));  // (0.05-0.02)/0.2
        CHECK(!c.descent_jump);
    }
}

TEST_CASE("H0 checker reproduces the arithmetic examples") {
    TraceNorms norms;
    norms.velocity = 1.0;
    norms.temperature = 1.0;
    LawConstants j{1.0, 0.0, 10.0, 100, false};
    LawConstants j1{1.0, 0.0, 10.0, 100, false};

    SUBCASE("pass with margin 10 - 2 sqrt 2") {
        const auto rep = check_H0(j, j1, 10.0, 10.0, norms);
        CHECK(rep.velocity_ok);
        CHECK(rep.velocity_margin == doctest::Approx(10.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-14));
    }
    SUBCASE("fail at 0.1 < 2 sqrt 2") {
        const auto rep = check_H0(j, j1, 10.0, 0.1, norms);
        CHECK(!rep.thermal_ok);
        CHECK(rep.thermal_margin < 0.0);
    }
    SUBCASE("strict inequality: equality fails") {
        const double alpha = 2.0 * std::sqrt(2.0) * 1.0 * 1.0;
        const auto rep = check_H0(j, j1, alpha, 10.0, norms);
        CHECK(!rep.velocity_ok);
    }
}

TEST_CASE("conductivity specs verify their declared bounds") {
    ConductivitySpec ok{ConductivitySpec::OffsetSin{2.0, 1.0}, 0.9, 3.1, 1.1};
    CHECK(ok.check().empty());
    CHECK(ok.value(0.0) == doctest::Approx(2.0));

    ConductivitySpec bad_delta{ConductivitySpec::Constant{1.0}, 0.0, 2.0, 0.0};
    CHECK(!bad_delta.check().empty());

    ConductivitySpec too_low{ConductivitySpec::OffsetSin{1.0, 0.9}, 0.5, 2.0, 1.0};
    CHECK(!too_low.check().empty());  // min 0.1 < delta

    ConductivitySpec clipped{ConductivitySpec::ClippedPoly{{1.0, 0.0, 1.0}, 0.8, 4.0}, 0.5, 4.5,
                             10.0};
    CHECK(clipped.check().empty());
    CHECK(clipped.value(10.0) == doctest::Approx(4.0));  // clamped above
}

TEST_CASE("buoyancy is linear with the declared operator norm") {
    BuoyancySpec f{Vec2(0.0, 1.0), 2.5};
    const Vec2 a = f.apply(0.3), b = f.apply(-1.1);
    const Vec2 combo = f.apply(2.0 * 0.3 + 3.0 * (-1.1));
    CHECK((2.0 * a + 3.0 * b - combo).norm() <= 1e-15);
    CHECK(f.l2_operator_norm() == doctest::Approx(2.5));
}
