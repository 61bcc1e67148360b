#include "bouss/forms.hpp"

#include "oracle.hpp"

#include <doctest.h>

#include <random>

using namespace bouss;

namespace {

DiscreteSpaces unit_square(int n, std::set<Side> gamma1 = {}) {
    return build_spaces(build_rect_mesh(n, n, BoundaryTagging{std::move(gamma1)}));
}

Eigen::VectorXd random_vec(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = dist(rng);
    return v;
}

}  // namespace

TEST_CASE("a0 on hand-computed fields") {
    const auto sp = unit_square(3);
    const double alpha = 1.7;
    const SpMat A0 = assemble_velocity_a0(sp, alpha);

    const auto u1 = oracle::interp_velocity(sp, [](const Vec2& x) { return Vec2(x.x(), 0.0); });
    CHECK(u1.dot(A0 * u1) == doctest::Approx(2.0 * alpha).epsilon(1e-13));

    const auto u2 = oracle::interp_velocity(sp, [](const Vec2& x) { return Vec2(x.y(), x.x()); });
    CHECK(u2.dot(A0 * u2) == doctest::Approx(4.0 * alpha).epsilon(1e-13));

    CHECK_THROWS_AS(assemble_velocity_a0(sp, 0.0), std::invalid_argument);
}

TEST_CASE("a0 is symmetric, positive on random vectors, and matches the oracle") {
    const auto sp = unit_square(4, {Side::bottom});
    const SpMat A0 = assemble_velocity_a0(sp, 2.0);
    const SpMat diff = SpMat(A0 - SpMat(A0.transpose()));
    double max_asym = 0.0, max_entry = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SpMat::InnerIterator it(diff, k); it; ++it)
            max_asym = std::max(max_asym, std::abs(it.value()));
    for (int k = 0; k < A0.outerSize(); ++k)
        for (SpMat::InnerIterator it(A0, k); it; ++it)
            max_entry = std::max(max_entry, std::abs(it.value()));
    CHECK(max_asym <= 1e-12 * max_entry);

    for (unsigned seed : {1u, 2u, 3u}) {
        const auto w = random_vec(2 * sp.n_p2, seed);
        const double quad_form = w.dot(A0 * w);
        CHECK(quad_form > 0.0);
        CHECK(quad_form == doctest::Approx(oracle::a0(sp, 2.0, w, w)).epsilon(1e-10));
    }
}

TEST_CASE("velocity mass matrix matches the oracle and is positive definite") {
    const auto sp = unit_square(3);
    const SpMat M = assemble_velocity_mass(sp);
    const auto w = random_vec(2 * sp.n_p2, 11);
    CHECK(w.dot(M * w) > 0.0);
    CHECK(w.dot(M * w) == doctest::Approx(oracle::mass_u(sp, w, w)).epsilon(1e-10));
}

TEST_CASE("plain and skew convection on hand-computed fields") {
    const auto sp = unit_square(3);
    const auto w = oracle::interp_velocity(sp, [](const Vec2&) { return Vec2(1.0, 0.0); });
    const auto v = oracle::interp_velocity(sp, [](const Vec2& x) { return Vec2(x.x(), 0.0); });
    const auto z = oracle::interp_velocity(sp, [](const Vec2&) { return Vec2(1.0, 0.0); });

    const SpMat N = assemble_convection_velocity(sp, w);
    // a1(w, v, z) = int ((w.grad)v).z = 1 on the unit square
    CHECK(z.dot(N * v) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(v.dot(N * z) == doctest::Approx(0.0).epsilon(1e-13));

    const SpMat Ns = skew_part(N);
    CHECK(z.dot(Ns * v) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("skew convection annihilates every vector exactly") {
    const auto sp = unit_square(4, {Side::bottom});
    for (unsigned seed : {5u, 6u}) {
        const auto w = random_vec(2 * sp.n_p2, seed);
        const SpMat Ns = skew_part(assemble_convection_velocity(sp, w));
        double nrm = 0.0;
        for (int k = 0; k < Ns.outerSize(); ++k)
            for (SpMat::InnerIterator it(Ns, k); it; ++it)
                nrm = std::max(nrm, std::abs(it.value()));
        for (unsigned zseed : {21u, 22u, 23u}) {
            const auto z = random_vec(2 * sp.n_p2, zseed);
            CHECK(std::abs(z.dot(Ns * z)) <= 1e-13 * nrm * z.squaredNorm());
        }
    }
}

TEST_CASE("plain convection matches the oracle on random fields") {
    const auto sp = unit_square(3);
    const auto w = random_vec(2 * sp.n_p2, 31);
    const auto v = random_vec(2 * sp.n_p2, 32);
    const auto z = random_vec(2 * sp.n_p2, 33);
    const SpMat N = assemble_convection_velocity(sp, w);
    CHECK(z.dot(N * v) == doctest::Approx(oracle::a1(sp, w, v, z)).epsilon(1e-10));
}

TEST_CASE("skew form converges to the plain form for divergence-free fields") {
    // u = curl(psi): exactly divergence-free with zero boundary values
    auto field = [](const Vec2& x) {
        const double pi = std::acos(-1.0);
        const double sx = std::sin(pi * x.x()), sy = std::sin(pi * x.y());
        const double cx = std::cos(pi * x.x()), cy = std::cos(pi * x.y());
        return Vec2(pi * sx * sx * 2.0 * sy * cy, -pi * 2.0 * sx * cx * sy * sy);
    };
    double prev = 1e300;
    for (int n : {4, 8, 16}) {
        const auto sp = unit_square(n);
        const auto w = oracle::interp_velocity(sp, field);
        const auto v = random_vec(2 * sp.n_p2, 41);
        const auto z = random_vec(2 * sp.n_p2, 42);
        const SpMat N = assemble_convection_velocity(sp, w);
        const SpMat Ns = skew_part(N);
        const double gap = std::abs(z.dot(N * v) - z.dot(Ns * v));
        // random v, z are mesh-dependent; normalize by their size
        const double rel = gap / (v.norm() * z.norm());
        CHECK(rel < prev);
        prev = rel;
    }
}

TEST_CASE("b0 with constant and varying conductivity") {
    const auto sp = unit_square(3, {Side::bottom});
    const SpMat K = assemble_temperature_stiffness(sp);

    ConductivitySpec one{ConductivitySpec::Constant{1.0}, 0.5, 1.5, 0.0};
    const Eigen::VectorXd mu0 = Eigen::VectorXd::Zero(sp.n_vertices);
    const SpMat B1m = assemble_b0(sp, one, mu0);
    const SpMat diff = SpMat(B1m - K);
    double max_diff = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SpMat::InnerIterator it(diff, k); it; ++it)
            max_diff = std::max(max_diff, std::abs(it.value()));
    CHECK(max_diff <= 1e-12);

    ConductivitySpec sin_spec{ConductivitySpec::OffsetSin{2.0, 1.0}, 0.9, 3.1, 1.1};
    const SpMat B2 = assemble_b0(sp, sin_spec, mu0);  // k(0) = 2
    const SpMat diff2 = SpMat(B2 - SpMat(2.0 * K));
    double max_diff2 = 0.0;
    for (int k = 0; k < diff2.outerSize(); ++k)
        for (SpMat::InnerIterator it(diff2, k); it; ++it)
            max_diff2 = std::max(max_diff2, std::abs(it.value()));
    CHECK(max_diff2 <= 1e-12);

    // clipped quadratic: symmetric, Rayleigh quotients within [delta, sup k]
    ConductivitySpec clipped{ConductivitySpec::ClippedPoly{{1.0, 0.0, 1.0}, 0.7, 5.0}, 0.65, 5.1,
                             20.0};
    const auto mu = random_vec(sp.n_vertices, 55);
    const SpMat B3 = assemble_b0(sp, clipped, mu);
    CHECK(B3.isApprox(SpMat(B3.transpose()), 1e-13));
    for (unsigned seed : {61u, 62u, 63u}) {
        Eigen::VectorXd z = random_vec(sp.n_vertices, seed);
        z.array() -= z.mean();  // keep it out of the stiffness kernel
        const double rayleigh = z.dot(B3 * z) / z.dot(K * z);
        CHECK(rayleigh >= 0.7 * (1.0 - 1e-10));
        CHECK(rayleigh <= 5.0 * (1.0 + 1e-10));
    }
    // the quadrature-equivalence oracle needs a coefficient field both rules
    // resolve; random nodal noise oscillates at the mesh scale, a smooth
    // interpolant does not
    const auto mu_smooth =
        oracle::interp_p1(sp, [](const Vec2& x) { return std::sin(2.0 * x.x() + x.y()); });
    const SpMat B4 = assemble_b0(sp, sin_spec, mu_smooth);
    const auto eta = random_vec(sp.n_vertices, 56);
    CHECK(eta.dot(B4 * eta) ==
          doctest::Approx(oracle::b0(sp, sin_spec, mu_smooth, eta, eta)).epsilon(1e-8));
}

TEST_CASE("b1 plain and skew forms on hand-computed fields") {
    const auto sp = unit_square(3);
    const auto w = oracle::interp_velocity(sp, [](const Vec2&) { return Vec2(1.0, 0.0); });
    const auto eta = oracle::interp_p1(sp, [](const Vec2& x) { return x.x(); });
    const auto zeta = oracle::interp_p1(sp, [](const Vec2&) { return 1.0; });

    const SpMat B = assemble_convection_temperature(sp, w);
    CHECK(zeta.dot(B * eta) == doctest::Approx(1.0).epsilon(1e-13));
    const SpMat Bs = skew_part(B);
    CHECK(zeta.dot(Bs * eta) == doctest::Approx(0.5).epsilon(1e-13));

    for (unsigned seed : {71u, 72u}) {
        const auto z = random_vec(sp.n_vertices, seed);
        CHECK(std::abs(z.dot(Bs * z)) <= 1e-13 * z.squaredNorm() * 10.0);
    }
    const auto wr = random_vec(2 * sp.n_p2, 73);
    const auto er = random_vec(sp.n_vertices, 74);
    const auto zr = random_vec(sp.n_vertices, 75);
    const SpMat Br = assemble_convection_temperature(sp, wr);
    CHECK(zr.dot(Br * er) == doctest::Approx(oracle::b1(sp, wr, er, zr)).epsilon(1e-10));
}

TEST_CASE("divergence coupling on hand-computed fields") {
    const auto sp = unit_square(3);
    const SpMat C = assemble_divergence(sp);

    const auto div_free =
        oracle::interp_velocity(sp, [](const Vec2& x) { return Vec2(x.x(), -x.y()); });
    CHECK((C * div_free).norm() <= 1e-12);

    const auto vx = oracle::interp_velocity(sp, [](const Vec2& x) { return Vec2(x.x(), 0.0); });
    const auto q1 = oracle::interp_p1(sp, [](const Vec2&) { return 1.0; });
    CHECK(q1.dot(C * vx) == doctest::Approx(-1.0).epsilon(1e-13));

    const auto constant =
        oracle::interp_velocity(sp, [](const Vec2&) { return Vec2(3.0, -2.0); });
    CHECK((C * constant).norm() <= 1e-12);

    const auto vr = random_vec(2 * sp.n_p2, 81);
    const auto qr = random_vec(sp.n_vertices, 82);
    CHECK(qr.dot(C * vr) == doctest::Approx(oracle::divergence_form(sp, vr, qr)).epsilon(1e-10));
}

TEST_CASE("lagged p-Laplacian matrix") {
    const auto sp = unit_square(3, {Side::bottom});
    const SpMat K = assemble_temperature_stiffness(sp);

    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(sp.n_vertices);
    CHECK(assemble_p_laplacian(sp, zero).norm() == 0.0);

    const auto lin = oracle::interp_p1(sp, [](const Vec2& x) { return x.x(); });
    const SpMat G1 = assemble_p_laplacian(sp, lin);
    const SpMat diff = SpMat(G1 - K);
    double max_diff = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SpMat::InnerIterator it(diff, k); it; ++it)
            max_diff = std::max(max_diff, std::abs(it.value()));
    CHECK(max_diff <= 1e-12);

    const auto tr = random_vec(sp.n_vertices, 91);
    const auto zr = random_vec(sp.n_vertices, 92);
    const SpMat G = assemble_p_laplacian(sp, tr);
    CHECK(zr.dot(G * zr) == doctest::Approx(oracle::p_laplacian(sp, tr, zr, zr)).epsilon(1e-10));
    CHECK(zr.dot(G * zr) >= 0.0);
}

TEST_CASE("gamma1 quadrature tables") {
    const auto sp = unit_square(4, {Side::bottom});
    const auto quad = build_gamma1_quad(sp);
    CHECK(quad.points.size() == 16);  // 4 edges x 4 points
    CHECK(quad.measure == doctest::Approx(1.0).epsilon(1e-14));
    double wsum = 0.0;
    for (const auto& p : quad.points) {
        wsum += p.w;
        CHECK(p.normal.isApprox(Vec2(0, -1), 1e-14));
        CHECK(p.x.y() == doctest::Approx(0.0));
    }
    CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(build_gamma1_quad(sp, 2), std::invalid_argument);
}

TEST_CASE("boundary nonsmooth residual") {
    const auto sp = unit_square(4, {Side::bottom});
    const auto quad = build_gamma1_quad(sp);

    SUBCASE("zero law gives zero residual and multiplier") {
        const auto law = mollify(law_zero(), 8);
        const auto u = random_vec(2 * sp.n_p2, 101);
        const auto res = boundary_nonsmooth_residual_velocity(sp, quad, law, u);
        CHECK(res.r_full.norm() == 0.0);
        for (double m : res.multiplier) CHECK(m == 0.0);
    }

    SUBCASE("quadratic law, unit tangential trace: residual pairs to |Gamma1|") {
        const auto law = mollify(law_quadratic(1.0), 8);
        // u = tau everywhere: u_tau = 1 on the bottom
        Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * sp.n_p2);
        for (int a = 0; a < sp.n_p2; ++a) {
            u[2 * a + 0] = -1.0;  // tau = (-1, 0) on the bottom
            u[2 * a + 1] = 0.0;
        }
        const auto res = boundary_nonsmooth_residual_velocity(sp, quad, law, u);
        for (double s : res.trace) CHECK(s == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(res.r_full.dot(u) == doctest::Approx(quad.measure).epsilon(1e-10));
    }

    SUBCASE("residual matches the independent boundary quadrature oracle") {
        // the equivalence check needs an integrand both rules resolve: the
        // quadratic law has Dj_m(s) = s, a polynomial along each edge
        const auto law = mollify(law_quadratic(1.3), 8);
        const auto u = random_vec(2 * sp.n_p2, 111);
        const auto v = random_vec(2 * sp.n_p2, 112);
        const auto res = boundary_nonsmooth_residual_velocity(sp, quad, law, u);
        CHECK(res.r_full.dot(v) ==
              doctest::Approx(oracle::boundary_friction_residual(sp, law, u, v)).epsilon(1e-8));

        const auto th = random_vec(sp.n_vertices, 113);
        const auto z = random_vec(sp.n_vertices, 114);
        const auto law1 = mollify(law_quadratic(0.7), 8);
        const auto res1 = boundary_nonsmooth_residual_temperature(sp, quad, law1, th);
        CHECK(res1.r_full.dot(z) ==
              doctest::Approx(oracle::boundary_heat_residual(sp, law1, th, z)).epsilon(1e-8));
        // a kink-scale law at a resolved trace amplitude
        const auto ramp = mollify(law_stick_slip_ramp(0.5, 0.2, 0.3, 0.4), 2);
        const Eigen::VectorXd u_small = 0.05 * u;
        const auto res2 = boundary_nonsmooth_residual_velocity(sp, quad, ramp, u_small);
        CHECK(res2.r_full.dot(v) ==
              doctest::Approx(oracle::boundary_friction_residual(sp, ramp, u_small, v))
                  .epsilon(1e-6));
    }

    SUBCASE("multiplier values stay in the neighborhood Clarke hull") {
        const auto base = law_stick_slip_jump(0.5, 0.2, 0.3);
        const auto law = mollify(base, 8);
        const auto u = random_vec(2 * sp.n_p2, 121);
        const auto res = boundary_nonsmooth_residual_velocity(sp, quad, law, u);
        for (size_t i = 0; i < res.multiplier.size(); ++i) {
            double lo = 1e300, hi = -1e300;
            for (int k = 0; k <= 32; ++k) {
                const double z = res.trace[i] - law.radius() + 2.0 * law.radius() * k / 32.0;
                const auto iv = eval_clarke(base, z);
                lo = std::min(lo, iv.lo);
                hi = std::max(hi, iv.hi);
            }
            CHECK(res.multiplier[i] >= lo - 1e-8);
            CHECK(res.multiplier[i] <= hi + 1e-8);
        }
    }
}

TEST_CASE("velocity trace gram matches the boundary oracle") {
    const auto sp = unit_square(3, {Side::bottom, Side::right});
    const auto quad = build_gamma1_quad(sp);
    const SpMat B = assemble_velocity_trace_gram(sp, quad);
    const auto u = random_vec(2 * sp.n_p2, 131);
    CHECK(u.dot(B * u) == doctest::Approx(oracle::boundary_velocity_gram(sp, u, u)).epsilon(1e-10));
}
