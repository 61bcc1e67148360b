#include "bouss/quadrature.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace bouss {

std::vector<QuadPoint1D> gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    std::vector<QuadPoint1D> pts(n);
    const double pi = std::acos(-1.0);
    for (int k = 0; k < n; ++k) {
        // Newton iteration on P_n, started from the Chebyshev-like guess
        double x = std::cos(pi * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p_prev = 1.0, p_cur = x;
            for (int j = 2; j <= n; ++j) {
                const double p_next = ((2 * j - 1) * x * p_cur - (j - 1) * p_prev) / j;
                p_prev = p_cur;
                p_cur = p_next;
            }
            dp = n * (x * p_cur - p_prev) / (x * x - 1.0);
            const double dx = p_cur / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        pts[k].x = x;
        pts[k].w = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return pts;
}

std::vector<QuadPoint1D> gauss_legendre_unit(int n) {
    auto pts = gauss_legendre(n);
    for (auto& p : pts) {
        p.x = 0.5 * (p.x + 1.0);
        p.w *= 0.5;
    }
    return pts;
}

std::vector<TriQuadPoint> triangle_rule(int n) {
    auto g = gauss_legendre_unit(n);
    std::vector<TriQuadPoint> pts;
    pts.reserve(static_cast<size_t>(n) * n);
    for (const auto& pa : g) {
        for (const auto& pb : g) {
            TriQuadPoint q;
            q.xi = pa.x * (1.0 - pb.x);
            q.eta = pb.x;
            q.w = pa.w * pb.w * (1.0 - pb.x);
            pts.push_back(q);
        }
    }
    return pts;
}

std::vector<TriQuadPoint> triangle_rule_refined(int n) {
    auto base = triangle_rule(n);
    // children (v0,m01,m02), (m01,v1,m12), (m02,m12,v2), (m01,m12,m02)
    const std::array<std::array<double, 6>, 4> maps = {{
        {0.0, 0.0, 0.5, 0.0, 0.0, 0.5},
        {0.5, 0.0, 1.0, 0.0, 0.5, 0.5},
        {0.0, 0.5, 0.5, 0.5, 0.0, 1.0},
        {0.5, 0.0, 0.5, 0.5, 0.0, 0.5},
    }};
    std::vector<TriQuadPoint> pts;
    pts.reserve(base.size() * 4);
    for (const auto& m : maps) {
        const double x0 = m[0], y0 = m[1], x1 = m[2], y1 = m[3], x2 = m[4], y2 = m[5];
        for (const auto& q : base) {
            TriQuadPoint r;
            const double l0 = 1.0 - q.xi - q.eta;
            r.xi = l0 * x0 + q.xi * x1 + q.eta * x2;
            r.eta = l0 * y0 + q.xi * y1 + q.eta * y2;
            r.w = q.w * 0.25;  // each child has a quarter of the area
            pts.push_back(r);
        }
    }
    return pts;
}

}  // namespace bouss
