#include "bouss/forms.hpp"

#include <Eigen/Dense>

#include <stdexcept>

namespace bouss {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct TriGeom {
    Vec2 a, b, c;
    Eigen::Matrix2d jac;      // columns b-a, c-a
    Eigen::Matrix2d jac_inv_t;
    double det = 0.0;         // = 2 * area
};

TriGeom tri_geom(const DiscreteSpaces& sp, size_t t) {
    TriGeom g;
    const auto& tri = sp.mesh.triangles[t];
    g.a = sp.mesh.vertices[tri[0]];
    g.b = sp.mesh.vertices[tri[1]];
    g.c = sp.mesh.vertices[tri[2]];
    g.jac.col(0) = g.b - g.a;
    g.jac.col(1) = g.c - g.a;
    g.det = g.jac.determinant();
    g.jac_inv_t = g.jac.inverse().transpose();
    return g;
}

// the shared assembly rule: exact through total degree 6
const std::vector<TriQuadPoint>& assembly_rule() {
    static const std::vector<TriQuadPoint> rule = triangle_rule(4);
    return rule;
}

P2Eval eval_p2_ref(const TriGeom& g, double xi, double eta) {
    P2Eval e;
    const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
    e.shape = {l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1),
               4 * l0 * l1,       4 * l1 * l2,       4 * l0 * l2};
    const Vec2 dl0(-1, -1), dl1(1, 0), dl2(0, 1);
    const std::array<Vec2, 6> ref_grad = {
        (4 * l0 - 1) * dl0,          (4 * l1 - 1) * dl1,          (4 * l2 - 1) * dl2,
        4.0 * (l1 * dl0 + l0 * dl1), 4.0 * (l2 * dl1 + l1 * dl2), 4.0 * (l2 * dl0 + l0 * dl2)};
    for (int i = 0; i < 6; ++i) e.grad[i] = g.jac_inv_t * ref_grad[i];
    return e;
}

P1Eval eval_p1_ref(const TriGeom& g, double xi, double eta) {
    P1Eval e;
    e.shape = {1.0 - xi - eta, xi, eta};
    const std::array<Vec2, 3> ref_grad = {Vec2(-1, -1), Vec2(1, 0), Vec2(0, 1)};
    for (int i = 0; i < 3; ++i) e.grad[i] = g.jac_inv_t * ref_grad[i];
    return e;
}

SpMat from_triplets(int rows, int cols, const Triplets& trips) {
    SpMat m(rows, cols);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    return m;
}

}  // namespace

P2Eval eval_p2(const Vec2& a, const Vec2& b, const Vec2& c, double xi, double eta) {
    TriGeom g;
    g.a = a;
    g.b = b;
    g.c = c;
    g.jac.col(0) = b - a;
    g.jac.col(1) = c - a;
    g.det = g.jac.determinant();
    g.jac_inv_t = g.jac.inverse().transpose();
    return eval_p2_ref(g, xi, eta);
}

P1Eval eval_p1(const Vec2& a, const Vec2& b, const Vec2& c, double xi, double eta) {
    TriGeom g;
    g.jac.col(0) = b - a;
    g.jac.col(1) = c - a;
    g.jac_inv_t = g.jac.inverse().transpose();
    return eval_p1_ref(g, xi, eta);
}

SpMat assemble_velocity_a0(const DiscreteSpaces& sp, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("assemble_velocity_a0: alpha must be positive");
    Triplets trips;
    for (size_t t = 0; t < sp.mesh.triangles.size(); ++t) {
        const TriGeom g = tri_geom(sp, t);
        const auto& dofs = sp.tri_p2[t];
        Eigen::Matrix<double, 12, 12> local = Eigen::Matrix<double, 12, 12>::Zero();
        for (const auto& q : assembly_rule()) {
            const P2Eval e = eval_p2_ref(g, q.xi, q.eta);
            const double w = q.w * g.det;
            for (int a = 0; a < 6; ++a)
                for (int b = 0; b < 6; ++b) {
                    const double gg = e.grad[a].dot(e.grad[b]);
                    for (int ca = 0; ca < 2; ++ca)
                        for (int cb = 0; cb < 2; ++cb) {
                            // 2 alpha (eps : eps) for phi = e_ca N_a, e_cb N_b
                            double val = (ca == cb) ? gg : 0.0;
                            val += e.grad[a][cb] * e.grad[b][ca];
                            local(2 * a + ca, 2 * b + cb) += w * alpha * val;
                        }
                }
        }
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b)
                for (int ca = 0; ca < 2; ++ca)
                    for (int cb = 0; cb < 2; ++cb)
                        trips.emplace_back(2 * dofs[a] + ca, 2 * dofs[b] + cb,
                                           local(2 * a + ca, 2 * b + cb));
    }
    return from_triplets(2 * sp.n_p2, 2 * sp.n_p2, trips);
}

SpMat assemble_velocity_mass(const DiscreteSpaces& sp) {
    Triplets trips;
    for (size_t t = 0; t < sp.mesh.triangles.size(); ++t) {
        const TriGeom g = tri_geom(sp, t);
        const auto& dofs = sp.tri_p2[t];
        Eigen::Matrix<double, 6, 6> local = Eigen::Matrix<double, 6, 6>::Zero();
        for (const auto& q : assembly_rule()) {
            const P2Eval e = eval_p2_ref(g, q.xi, q.eta);
            const double w = q.w * g.det;
            for (int a = 0; a < 6; ++a)
                for (int b = 0; b < 6; ++b) local(a, b) += w * e.shape[a] * e.shape[b];
        }
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b)
                for (int c = 0; c < 2; ++c)
                    trips.emplace_back(2 * dofs[a] + c, 2 * dofs[b] + c, local(a, b));
    }
    return from_triplets(2 * sp.n_p2, 2 * sp.n_p2, trips);
}

SpMat assemble_temperature_mass(const DiscreteSpaces& sp) {
    Triplets trips;
    for (size_t t = 0; t < sp.mesh.triangles.size(); ++t) {
        const TriGeom g = tri_geom(sp, t);
        const auto& tri = sp.mesh.triangles[t];
        for (const auto& q : assembly_rule()) {
            const P1Eval e = eval_p1_ref(g, q.xi, q.eta);
            const double w = q.w * g.det;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    trips.emplace_back(tri[a], tri[b], w * e.shape[a] * e.shape[b]);
        }
    }
    return from_triplets(sp.n_vertices, sp.n_vertices, trips);
}

SpMat assemble_temperature_stiffness(const DiscreteSpaces& sp) {
    Triplets trips;
    for (size_t t = 0; t < sp.mesh.triangles.size(); ++t) {
        const TriGeom g = tri_geom(sp, t);
        const auto& tri = sp.mesh.triangles[t];
        const P1Eval e = eval_p1_ref(g, 1.0 / 3, 1.0 / 3);  // gradients constant
        const double area = 0.5 * g.det;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                trips.emplace_back(tri[a], tri[b], area * e.grad[a].dot(e.grad[b]));
    }
    return from_triplets(sp.n_vertices, sp.n_vertices, trips);
}

SpMat assemble_divergence(const DiscreteSpaces& sp) {
    Triplets trips;
    for (size_t t = 0; t < sp.mesh.triangles.size(); ++t) {
        const TriGeom g = tri_geom(sp, t);
        const auto& tri = sp.mesh.triangles[t];
        const auto& dofs = sp.tri_p2[t];
        for (const auto& q : assembly_rule()) {
            const P2Eval e2 = eval_p2_ref(g, q.xi, q.eta);
            const P1Eval e1 = eval_p1_ref(g, q.xi, q.eta);
            const double w = q.w * g.det;
            for (int p = 0; p < 3; ++p)
                for (int a = 0; a < 6; ++a)
                    for (int c = 0; c < 2; ++c)
                        trips.emplace_back(tri[p], 2 * dofs[a] + c,
                                           -w * e1.shape[p] * e2.grad[a][c]);
        }
    }
    return from_triplets(sp.n_pressure, 2 * sp.n_p2, trips);
}

SpMat assemble_b0(const DiscreteSpaces& sp, const ConductivitySpec& k,
                  const Eigen::VectorXd& mu_vertex) {
    Triplets trips;
    for (size_t t = 0; t < sp.mesh.triangles.size(); ++t) {
        const TriGeom g = tri_geom(sp, t);
        const auto& tri = sp.mesh.triangles[t];
        for (const auto& q : assembly_rule()) {
            const P1Eval e = eval_p1_ref(g, q.xi, q.eta);
            double mu = 0.0;
            for (int a = 0; a < 3; ++a) mu += mu_vertex[tri[a]] * e.shape[a];
            const double w = q.w * g.det * k.value(mu);
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    trips.emplace_back(tri[a], tri[b], w * e.grad[a].dot(e.grad[b]));
        }
    }
    return from_triplets(sp.n_vertices, sp.n_vertices, trips);
}

SpMat assemble_convection_velocity(const DiscreteSpaces& sp, const Eigen::VectorXd& w_full) {
    Triplets trips;
    for (size_t t = 0; t < sp.mesh.triangles.size(); ++t) {
        const TriGeom g = tri_geom(sp, t);
        const auto& dofs = sp.tri_p2[t];
        Eigen::Matrix<double, 6, 6> local = Eigen::Matrix<double, 6, 6>::Zero();
        for (const auto& q : assembly_rule()) {
            const P2Eval e = eval_p2_ref(g, q.xi, q.eta);
            Vec2 w_here(0.0, 0.0);
            for (int a = 0; a < 6; ++a) {
                w_here.x() += w_full[2 * dofs[a] + 0] * e.shape[a];
                w_here.y() += w_full[2 * dofs[a] + 1] * e.shape[a];
            }
            const double w = q.w * g.det;
            for (int b = 0; b < 6; ++b) {  // trial
                const double adv = w_here.dot(e.grad[b]);
                for (int a = 0; a < 6; ++a) local(a, b) += w * adv * e.shape[a];
            }
        }
        for (int a = 0; a < 6; ++a)
            for (int b = 0; b < 6; ++b)
                for (int c = 0; c < 2; ++c)
                    trips.emplace_back(2 * dofs[a] + c, 2 * dofs[b] + c, local(a, b));
    }
    return from_triplets(2 * sp.n_p2, 2 * sp.n_p2, trips);
}

SpMat assemble_convection_temperature(const DiscreteSpaces& sp, const Eigen::VectorXd& w_full) {
    Triplets trips;
    for (size_t t = 0; t < sp.mesh.triangles.size(); ++t) {
        const TriGeom g = tri_geom(sp, t);
        const auto& tri = sp.mesh.triangles[t];
        const auto& dofs = sp.tri_p2[t];
        for (const auto& q : assembly_rule()) {
            const P2Eval e2 = eval_p2_ref(g, q.xi, q.eta);
            const P1Eval e1 = eval_p1_ref(g, q.xi, q.eta);
            Vec2 w_here(0.0, 0.0);
            for (int a = 0; a < 6; ++a) {
                w_here.x() += w_full[2 * dofs[a] + 0] * e2.shape[a];
                w_here.y() += w_full[2 * dofs[a] + 1] * e2.shape[a];
            }
            const double w = q.w * g.det;
            for (int b = 0; b < 3; ++b) {
                const double adv = w_here.dot(e1.grad[b]);
                for (int a = 0; a < 3; ++a) trips.emplace_back(tri[a], tri[b], w * adv * e1.shape[a]);
            }
        }
    }
    return from_triplets(sp.n_vertices, sp.n_vertices, trips);
}

SpMat assemble_p_laplacian(const DiscreteSpaces& sp, const Eigen::VectorXd& theta_vertex) {
    Triplets trips;
    for (size_t t = 0; t < sp.mesh.triangles.size(); ++t) {
        const TriGeom g = tri_geom(sp, t);
        const auto& tri = sp.mesh.triangles[t];
        const P1Eval e = eval_p1_ref(g, 1.0 / 3, 1.0 / 3);
        Vec2 grad_theta(0.0, 0.0);
        for (int a = 0; a < 3; ++a) grad_theta += theta_vertex[tri[a]] * e.grad[a];
        const double coeff = grad_theta.squaredNorm();
        const double area = 0.5 * g.det;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                trips.emplace_back(tri[a], tri[b], area * coeff * e.grad[a].dot(e.grad[b]));
    }
    return from_triplets(sp.n_vertices, sp.n_vertices, trips);
}

SpMat assemble_mixed_mass(const DiscreteSpaces& sp) {
    Triplets trips;
    for (size_t t = 0; t < sp.mesh.triangles.size(); ++t) {
        const TriGeom g = tri_geom(sp, t);
        const auto& tri = sp.mesh.triangles[t];
        const auto& dofs = sp.tri_p2[t];
        for (const auto& q : assembly_rule()) {
            const P2Eval e2 = eval_p2_ref(g, q.xi, q.eta);
            const P1Eval e1 = eval_p1_ref(g, q.xi, q.eta);
            const double w = q.w * g.det;
            for (int a = 0; a < 6; ++a)
                for (int p = 0; p < 3; ++p)
                    trips.emplace_back(dofs[a], tri[p], w * e2.shape[a] * e1.shape[p]);
        }
    }
    return from_triplets(sp.n_p2, sp.n_vertices, trips);
}

SpMat skew_part(const SpMat& A) {
    SpMat At = SpMat(A.transpose());
    SpMat S = 0.5 * (A - At);
    S.prune(0.0, 0.0);
    S.makeCompressed();
    return S;
}

Eigen::VectorXd assemble_velocity_load(const DiscreteSpaces& sp,
                                       const std::function<Vec2(const Vec2&)>& f) {
    Eigen::VectorXd load = Eigen::VectorXd::Zero(2 * sp.n_p2);
    for (size_t t = 0; t < sp.mesh.triangles.size(); ++t) {
        const TriGeom g = tri_geom(sp, t);
        const auto& dofs = sp.tri_p2[t];
        for (const auto& q : assembly_rule()) {
            const P2Eval e = eval_p2_ref(g, q.xi, q.eta);
            const Vec2 x = g.a + g.jac * Vec2(q.xi, q.eta);
            const Vec2 fv = f(x);
            const double w = q.w * g.det;
            for (int a = 0; a < 6; ++a) {
                load[2 * dofs[a] + 0] += w * fv.x() * e.shape[a];
                load[2 * dofs[a] + 1] += w * fv.y() * e.shape[a];
            }
        }
    }
    return load;
}

Eigen::VectorXd assemble_temperature_load(const DiscreteSpaces& sp,
                                          const std::function<double(const Vec2&)>& f) {
    Eigen::VectorXd load = Eigen::VectorXd::Zero(sp.n_vertices);
    for (size_t t = 0; t < sp.mesh.triangles.size(); ++t) {
        const TriGeom g = tri_geom(sp, t);
        const auto& tri = sp.mesh.triangles[t];
        for (const auto& q : assembly_rule()) {
            const P1Eval e = eval_p1_ref(g, q.xi, q.eta);
            const Vec2 x = g.a + g.jac * Vec2(q.xi, q.eta);
            const double w = q.w * g.det * f(x);
            for (int a = 0; a < 3; ++a) load[tri[a]] += w * e.shape[a];
        }
    }
    return load;
}

double l2_norm_sq(const DiscreteSpaces& sp, const std::function<double(const Vec2&)>& f) {
    double total = 0.0;
    for (size_t t = 0; t < sp.mesh.triangles.size(); ++t) {
        const TriGeom g = tri_geom(sp, t);
        for (const auto& q : assembly_rule()) {
            const Vec2 x = g.a + g.jac * Vec2(q.xi, q.eta);
            const double v = f(x);
            total += q.w * g.det * v * v;
        }
    }
    return total;
}

SpMat reduce(const SpMat& R, const SpMat& A) {
    SpMat out = R.transpose() * A * R;
    out.makeCompressed();
    return out;
}

Gamma1Quad build_gamma1_quad(const DiscreteSpaces& sp, int points_per_edge) {
    if (points_per_edge < 3)
        throw std::invalid_argument("build_gamma1_quad: need at least 3 points per edge");
    Gamma1Quad quad;
    quad.points_per_edge = points_per_edge;
    const auto rule = gauss_legendre_unit(points_per_edge);
    for (size_t e = 0; e < sp.mesh.boundary_edges.size(); ++e) {
        const auto& seg = sp.mesh.boundary_edges[e];
        if (seg.tag != BoundaryTag::gamma1) continue;
        const Vec2 x0 = sp.mesh.vertices[seg.v0], x1 = sp.mesh.vertices[seg.v1];
        for (const auto& g : rule) {
            Gamma1QuadPoint p;
            const double t = g.x;
            p.x = (1.0 - t) * x0 + t * x1;
            p.w = g.w * seg.length;
            p.normal = seg.normal;
            p.tangent = seg.tangent;
            p.edge = static_cast<int>(e);
            p.vel_nodes = sp.boundary_edge_p2[e];
            p.vel_shape = {(1 - t) * (1 - 2 * t), t * (2 * t - 1), 4 * t * (1 - t)};
            p.th_nodes = {seg.v0, seg.v1};
            p.th_shape = {1 - t, t};
            quad.points.push_back(p);
        }
        quad.measure += seg.length;
    }
    return quad;
}

SpMat assemble_velocity_trace_gram(const DiscreteSpaces& sp, const Gamma1Quad& quad) {
    Triplets trips;
    for (const auto& p : quad.points) {
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                for (int c = 0; c < 2; ++c)
                    trips.emplace_back(2 * p.vel_nodes[a] + c, 2 * p.vel_nodes[b] + c,
                                       p.w * p.vel_shape[a] * p.vel_shape[b]);
    }
    return from_triplets(2 * sp.n_p2, 2 * sp.n_p2, trips);
}

SpMat assemble_temperature_trace_gram(const DiscreteSpaces& sp, const Gamma1Quad& quad) {
    Triplets trips;
    for (const auto& p : quad.points) {
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b)
                trips.emplace_back(p.th_nodes[a], p.th_nodes[b],
                                   p.w * p.th_shape[a] * p.th_shape[b]);
    }
    return from_triplets(sp.n_vertices, sp.n_vertices, trips);
}

std::vector<double> tangential_trace(const DiscreteSpaces& sp, const Gamma1Quad& quad,
                                     const Eigen::VectorXd& u_full) {
    (void)sp;
    std::vector<double> s(quad.points.size(), 0.0);
    for (size_t i = 0; i < quad.points.size(); ++i) {
        const auto& p = quad.points[i];
        Vec2 u(0.0, 0.0);
        for (int a = 0; a < 3; ++a) {
            u.x() += u_full[2 * p.vel_nodes[a] + 0] * p.vel_shape[a];
            u.y() += u_full[2 * p.vel_nodes[a] + 1] * p.vel_shape[a];
        }
        s[i] = u.dot(p.tangent);
    }
    return s;
}

std::vector<double> temperature_trace(const DiscreteSpaces& sp, const Gamma1Quad& quad,
                                      const Eigen::VectorXd& theta_vertex) {
    (void)sp;
    std::vector<double> s(quad.points.size(), 0.0);
    for (size_t i = 0; i < quad.points.size(); ++i) {
        const auto& p = quad.points[i];
        s[i] = theta_vertex[p.th_nodes[0]] * p.th_shape[0] +
               theta_vertex[p.th_nodes[1]] * p.th_shape[1];
    }
    return s;
}

BoundaryResidual boundary_nonsmooth_residual_velocity(const DiscreteSpaces& sp,
                                                      const Gamma1Quad& quad,
                                                      const MollifiedLaw& law,
                                                      const Eigen::VectorXd& u_full) {
    BoundaryResidual res;
    res.r_full = Eigen::VectorXd::Zero(2 * sp.n_p2);
    res.trace = tangential_trace(sp, quad, u_full);
    res.multiplier.resize(quad.points.size());
    for (size_t i = 0; i < quad.points.size(); ++i) {
        const auto& p = quad.points[i];
        const double xi = law.deriv(res.trace[i]);
        res.multiplier[i] = xi;
        for (int a = 0; a < 3; ++a)
            for (int c = 0; c < 2; ++c)
                res.r_full[2 * p.vel_nodes[a] + c] += p.w * xi * p.tangent[c] * p.vel_shape[a];
    }
    return res;
}

BoundaryResidual boundary_nonsmooth_residual_temperature(const DiscreteSpaces& sp,
                                                         const Gamma1Quad& quad,
                                                         const MollifiedLaw& law,
                                                         const Eigen::VectorXd& theta_vertex) {
    BoundaryResidual res;
    res.r_full = Eigen::VectorXd::Zero(sp.n_vertices);
    res.trace = temperature_trace(sp, quad, theta_vertex);
    res.multiplier.resize(quad.points.size());
    for (size_t i = 0; i < quad.points.size(); ++i) {
        const auto& p = quad.points[i];
        const double xi1 = law.deriv(res.trace[i]);
        res.multiplier[i] = xi1;
        for (int a = 0; a < 2; ++a) res.r_full[p.th_nodes[a]] += p.w * xi1 * p.th_shape[a];
    }
    return res;
}

OperatorSet assemble_operators(const DiscreteSpaces& sp, double alpha) {
    OperatorSet ops;
    ops.alpha = alpha;
    ops.A0_full = assemble_velocity_a0(sp, alpha);
    ops.A0korn_full = assemble_velocity_a0(sp, 1.0);
    ops.Mu_full = assemble_velocity_mass(sp);
    ops.Mth_full = assemble_temperature_mass(sp);
    ops.Kth_full = assemble_temperature_stiffness(sp);
    ops.C_full = assemble_divergence(sp);
    ops.Mx_full = assemble_mixed_mass(sp);

    ops.A0 = reduce(sp.R_u, ops.A0_full);
    ops.A0korn = reduce(sp.R_u, ops.A0korn_full);
    ops.Mu = reduce(sp.R_u, ops.Mu_full);
    ops.Mth = reduce(sp.R_th, ops.Mth_full);
    ops.Kth = reduce(sp.R_th, ops.Kth_full);
    ops.C = ops.C_full * sp.R_u;
    ops.C.makeCompressed();

    ops.p_area = assemble_temperature_load(sp, [](const Vec2&) { return 1.0; });
    ops.gamma1 = build_gamma1_quad(sp);
    return ops;
}

}  // namespace bouss
