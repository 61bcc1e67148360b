#include "oracle.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace oracle {

namespace {

// classic degree-5 rule: centroid + two orbits of three points
struct RefPoint {
    double l0, l1, l2, w;
};

std::vector<RefPoint> degree5_rule() {
    const double a = (6.0 - std::sqrt(15.0)) / 21.0;
    const double b = (6.0 + std::sqrt(15.0)) / 21.0;
    const double wa = (155.0 - std::sqrt(15.0)) / 1200.0;
    const double wb = (155.0 + std::sqrt(15.0)) / 1200.0;
    std::vector<RefPoint> pts;
    pts.push_back({1.0 / 3, 1.0 / 3, 1.0 / 3, 9.0 / 40.0});
    pts.push_back({1 - 2 * a, a, a, wa});
    pts.push_back({a, 1 - 2 * a, a, wa});
    pts.push_back({a, a, 1 - 2 * a, wa});
    pts.push_back({1 - 2 * b, b, b, wb});
    pts.push_back({b, 1 - 2 * b, b, wb});
    pts.push_back({b, b, 1 - 2 * b, wb});
    return pts;  // weights sum to 1, scaled by triangle area below
}

double tri_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * std::abs((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

Vec2 barycentric(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& x) {
    Eigen::Matrix2d J;
    J.col(0) = b - a;
    J.col(1) = c - a;
    return J.inverse() * (x - a);  // (xi, eta)
}

}  // namespace

std::vector<QP> triangle_points(const Vec2& a, const Vec2& b, const Vec2& c, int nsub) {
    static const auto ref = degree5_rule();
    std::vector<QP> out;
    // nsub^2 congruent children of the triangle (rows of up- and
    // down-oriented cells in barycentric coordinates)
    for (int i = 0; i < nsub; ++i) {
        for (int j = 0; j < nsub - i; ++j) {
            // upward child with corners (i,j), (i+1,j), (i,j+1) in lattice
            const double s = 1.0 / nsub;
            const Vec2 p0 = a + (b - a) * (i * s) + (c - a) * (j * s);
            const Vec2 p1 = a + (b - a) * ((i + 1) * s) + (c - a) * (j * s);
            const Vec2 p2 = a + (b - a) * (i * s) + (c - a) * ((j + 1) * s);
            const double area_up = tri_area(p0, p1, p2);
            for (const auto& r : ref)
                out.push_back({r.l0 * p0 + r.l1 * p1 + r.l2 * p2, r.w * area_up});
            if (j < nsub - i - 1) {  // the downward partner
                const Vec2 q0 = p1;
                const Vec2 q1 = a + (b - a) * ((i + 1) * s) + (c - a) * ((j + 1) * s);
                const Vec2 q2 = p2;
                const double area_dn = tri_area(q0, q1, q2);
                for (const auto& r : ref)
                    out.push_back({r.l0 * q0 + r.l1 * q1 + r.l2 * q2, r.w * area_dn});
            }
        }
    }
    return out;
}

std::array<double, 6> p2_shape(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& x) {
    const Vec2 xe = barycentric(a, b, c, x);
    const double l1 = xe.x(), l2 = xe.y(), l0 = 1.0 - l1 - l2;
    return {l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1),
            4 * l0 * l1,       4 * l1 * l2,       4 * l0 * l2};
}

std::array<Vec2, 6> p2_grad(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& x) {
    const Vec2 xe = barycentric(a, b, c, x);
    const double l1 = xe.x(), l2 = xe.y(), l0 = 1.0 - l1 - l2;
    Eigen::Matrix2d J;
    J.col(0) = b - a;
    J.col(1) = c - a;
    const Eigen::Matrix2d Jit = J.inverse().transpose();
    const Vec2 g1 = Jit * Vec2(1, 0), g2 = Jit * Vec2(0, 1);
    const Vec2 g0 = -g1 - g2;
    return {(4 * l0 - 1) * g0,          (4 * l1 - 1) * g1,          (4 * l2 - 1) * g2,
            4 * (l0 * g1 + l1 * g0),    4 * (l1 * g2 + l2 * g1),    4 * (l0 * g2 + l2 * g0)};
}

std::array<double, 3> p1_shape(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& x) {
    const Vec2 xe = barycentric(a, b, c, x);
    return {1.0 - xe.x() - xe.y(), xe.x(), xe.y()};
}

std::array<Vec2, 3> p1_grad(const Vec2& a, const Vec2& b, const Vec2& c) {
    Eigen::Matrix2d J;
    J.col(0) = b - a;
    J.col(1) = c - a;
    const Eigen::Matrix2d Jit = J.inverse().transpose();
    const Vec2 g1 = Jit * Vec2(1, 0), g2 = Jit * Vec2(0, 1);
    return {-g1 - g2, g1, g2};
}

Vec2 velocity_at(const bouss::DiscreteSpaces& sp, size_t tri, const Eigen::VectorXd& u_full,
                 const Vec2& x) {
    const auto& t = sp.mesh.triangles[tri];
    const auto sh = p2_shape(sp.mesh.vertices[t[0]], sp.mesh.vertices[t[1]],
                             sp.mesh.vertices[t[2]], x);
    Vec2 u(0, 0);
    for (int k = 0; k < 6; ++k) {
        const int node = sp.tri_p2[tri][k];
        u.x() += u_full[2 * node + 0] * sh[k];
        u.y() += u_full[2 * node + 1] * sh[k];
    }
    return u;
}

Eigen::Matrix2d velocity_grad_at(const bouss::DiscreteSpaces& sp, size_t tri,
                                 const Eigen::VectorXd& u_full, const Vec2& x) {
    const auto& t = sp.mesh.triangles[tri];
    const auto gr = p2_grad(sp.mesh.vertices[t[0]], sp.mesh.vertices[t[1]],
                            sp.mesh.vertices[t[2]], x);
    Eigen::Matrix2d g = Eigen::Matrix2d::Zero();  // g(i,j) = d u_i / d x_j
    for (int k = 0; k < 6; ++k) {
        const int node = sp.tri_p2[tri][k];
        g.row(0) += u_full[2 * node + 0] * gr[k].transpose();
        g.row(1) += u_full[2 * node + 1] * gr[k].transpose();
    }
    return g;
}

double scalar_p1_at(const bouss::DiscreteSpaces& sp, size_t tri, const Eigen::VectorXd& vertex,
                    const Vec2& x) {
    const auto& t = sp.mesh.triangles[tri];
    const auto sh = p1_shape(sp.mesh.vertices[t[0]], sp.mesh.vertices[t[1]],
                             sp.mesh.vertices[t[2]], x);
    return vertex[t[0]] * sh[0] + vertex[t[1]] * sh[1] + vertex[t[2]] * sh[2];
}

Vec2 scalar_p1_grad_at(const bouss::DiscreteSpaces& sp, size_t tri,
                       const Eigen::VectorXd& vertex) {
    const auto& t = sp.mesh.triangles[tri];
    const auto gr = p1_grad(sp.mesh.vertices[t[0]], sp.mesh.vertices[t[1]],
                            sp.mesh.vertices[t[2]]);
    return vertex[t[0]] * gr[0] + vertex[t[1]] * gr[1] + vertex[t[2]] * gr[2];
}

namespace {

template <typename F>
double integrate(const bouss::DiscreteSpaces& sp, F&& f) {
    double acc = 0.0;
    for (size_t t = 0; t < sp.mesh.triangles.size(); ++t) {
        const auto& tri = sp.mesh.triangles[t];
        const auto pts = triangle_points(sp.mesh.vertices[tri[0]], sp.mesh.vertices[tri[1]],
                                         sp.mesh.vertices[tri[2]]);
        for (const auto& q : pts) acc += q.w * f(t, q.x);
    }
    return acc;
}

}  // namespace

double a0(const bouss::DiscreteSpaces& sp, double alpha, const Eigen::VectorXd& u_full,
          const Eigen::VectorXd& v_full) {
    return integrate(sp, [&](size_t t, const Vec2& x) {
        const Eigen::Matrix2d gu = velocity_grad_at(sp, t, u_full, x);
        const Eigen::Matrix2d gv = velocity_grad_at(sp, t, v_full, x);
        double s = 0.0;
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) s += (gu(i, j) + gu(j, i)) * (gv(i, j) + gv(j, i));
        return 0.5 * alpha * s;
    });
}

double mass_u(const bouss::DiscreteSpaces& sp, const Eigen::VectorXd& u_full,
              const Eigen::VectorXd& v_full) {
    return integrate(sp, [&](size_t t, const Vec2& x) {
        return velocity_at(sp, t, u_full, x).dot(velocity_at(sp, t, v_full, x));
    });
}

double a1(const bouss::DiscreteSpaces& sp, const Eigen::VectorXd& w_full,
          const Eigen::VectorXd& v_full, const Eigen::VectorXd& z_full) {
    return integrate(sp, [&](size_t t, const Vec2& x) {
        const Vec2 w = velocity_at(sp, t, w_full, x);
        const Eigen::Matrix2d gv = velocity_grad_at(sp, t, v_full, x);
        const Vec2 z = velocity_at(sp, t, z_full, x);
        return (gv * w).dot(z);  // ((w . grad) v) . z
    });
}

double b0(const bouss::DiscreteSpaces& sp, const bouss::ConductivitySpec& k,
          const Eigen::VectorXd& mu, const Eigen::VectorXd& eta, const Eigen::VectorXd& zeta) {
    return integrate(sp, [&](size_t t, const Vec2& x) {
        return k.value(scalar_p1_at(sp, t, mu, x)) *
               scalar_p1_grad_at(sp, t, eta).dot(scalar_p1_grad_at(sp, t, zeta));
    });
}

double b1(const bouss::DiscreteSpaces& sp, const Eigen::VectorXd& w_full,
          const Eigen::VectorXd& eta, const Eigen::VectorXd& zeta) {
    return integrate(sp, [&](size_t t, const Vec2& x) {
        const Vec2 w = velocity_at(sp, t, w_full, x);
        return w.dot(scalar_p1_grad_at(sp, t, eta)) * scalar_p1_at(sp, t, zeta, x);
    });
}

double divergence_form(const bouss::DiscreteSpaces& sp, const Eigen::VectorXd& v_full,
                       const Eigen::VectorXd& q) {
    return integrate(sp, [&](size_t t, const Vec2& x) {
        const Eigen::Matrix2d gv = velocity_grad_at(sp, t, v_full, x);
        return -(gv(0, 0) + gv(1, 1)) * scalar_p1_at(sp, t, q, x);
    });
}

double p_laplacian(const bouss::DiscreteSpaces& sp, const Eigen::VectorXd& theta,
                   const Eigen::VectorXd& eta, const Eigen::VectorXd& zeta) {
    return integrate(sp, [&](size_t t, const Vec2&) {
        const Vec2 g = scalar_p1_grad_at(sp, t, theta);
        return g.squaredNorm() *
               scalar_p1_grad_at(sp, t, eta).dot(scalar_p1_grad_at(sp, t, zeta));
    });
}

namespace {

// 16-point Gauss rule on [0,1], split into two halves of 8 points each,
// generated by Newton iteration written independently of the library path
std::vector<std::pair<double, double>> edge_rule() {
    static std::vector<std::pair<double, double>> rule;
    if (!rule.empty()) return rule;
    const int n = 8;
    const double pi = std::acos(-1.0);
    std::vector<std::pair<double, double>> base;
    for (int k = 0; k < n; ++k) {
        double x = std::cos(pi * (4.0 * k + 3.0) / (4.0 * n + 2.0));
        for (int it = 0; it < 80; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        base.emplace_back(x, 2.0 / ((1.0 - x * x) * dp * dp));
    }
    for (int half = 0; half < 2; ++half)
        for (const auto& [x, w] : base)
            rule.emplace_back(0.25 * (x + 1.0) + 0.5 * half, 0.25 * w);
    return rule;
}

template <typename F>
double integrate_gamma1(const bouss::DiscreteSpaces& sp, F&& f) {
    double acc = 0.0;
    for (size_t e = 0; e < sp.mesh.boundary_edges.size(); ++e) {
        const auto& seg = sp.mesh.boundary_edges[e];
        if (seg.tag != bouss::BoundaryTag::gamma1) continue;
        const Vec2 x0 = sp.mesh.vertices[seg.v0], x1 = sp.mesh.vertices[seg.v1];
        for (const auto& [t, w] : edge_rule())
            acc += w * seg.length * f(e, (1.0 - t) * x0 + t * x1, t);
    }
    return acc;
}

Vec2 edge_velocity(const bouss::DiscreteSpaces& sp, size_t edge, const Eigen::VectorXd& u_full,
                   double t) {
    const auto& nodes = sp.boundary_edge_p2[edge];
    const double sh0 = (1 - t) * (1 - 2 * t), sh1 = t * (2 * t - 1), sh2 = 4 * t * (1 - t);
    Vec2 u(0, 0);
    u.x() = u_full[2 * nodes[0]] * sh0 + u_full[2 * nodes[1]] * sh1 + u_full[2 * nodes[2]] * sh2;
    u.y() = u_full[2 * nodes[0] + 1] * sh0 + u_full[2 * nodes[1] + 1] * sh1 +
            u_full[2 * nodes[2] + 1] * sh2;
    return u;
}

}  // namespace

double boundary_friction_residual(const bouss::DiscreteSpaces& sp, const bouss::MollifiedLaw& law,
                                  const Eigen::VectorXd& u_full, const Eigen::VectorXd& v_full) {
    return integrate_gamma1(sp, [&](size_t e, const Vec2&, double t) {
        const auto& seg = sp.mesh.boundary_edges[e];
        const double s = edge_velocity(sp, e, u_full, t).dot(seg.tangent);
        const double vt = edge_velocity(sp, e, v_full, t).dot(seg.tangent);
        return law.deriv(s) * vt;
    });
}

double boundary_heat_residual(const bouss::DiscreteSpaces& sp, const bouss::MollifiedLaw& law,
                              const Eigen::VectorXd& theta, const Eigen::VectorXd& zeta) {
    return integrate_gamma1(sp, [&](size_t e, const Vec2&, double t) {
        const auto& seg = sp.mesh.boundary_edges[e];
        const double s = theta[seg.v0] * (1 - t) + theta[seg.v1] * t;
        const double z = zeta[seg.v0] * (1 - t) + zeta[seg.v1] * t;
        return law.deriv(s) * z;
    });
}

double boundary_velocity_gram(const bouss::DiscreteSpaces& sp, const Eigen::VectorXd& u_full,
                              const Eigen::VectorXd& v_full) {
    return integrate_gamma1(sp, [&](size_t e, const Vec2&, double t) {
        return edge_velocity(sp, e, u_full, t).dot(edge_velocity(sp, e, v_full, t));
    });
}

Eigen::VectorXd interp_velocity(const bouss::DiscreteSpaces& sp,
                                const std::function<Vec2(const Vec2&)>& f) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * sp.n_p2);
    for (int a = 0; a < sp.n_p2; ++a) {
        const Vec2 v = f(sp.p2_xy[a]);
        u[2 * a + 0] = v.x();
        u[2 * a + 1] = v.y();
    }
    return u;
}

Eigen::VectorXd interp_p1(const bouss::DiscreteSpaces& sp,
                          const std::function<double(const Vec2&)>& f) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(sp.n_vertices);
    for (int a = 0; a < sp.n_vertices; ++a) v[a] = f(sp.mesh.vertices[a]);
    return v;
}

}  // namespace oracle
