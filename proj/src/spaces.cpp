#include "bouss/spaces.hpp"

#include "bouss/forms.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <map>
#include <stdexcept>

namespace bouss {

namespace {

// unique-edge enumeration shared by P2 node layout and boundary lookup
std::map<std::array<int, 2>, int> enumerate_edges(const Mesh& mesh) {
    std::map<std::array<int, 2>, int> ids;
    for (const auto& tri : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            int a = tri[k], b = tri[(k + 1) % 3];
            if (a > b) std::swap(a, b);
            ids.emplace(std::array<int, 2>{a, b}, 0);
        }
    }
    int next = 0;
    for (auto& [edge, id] : ids) id = next++;
    return ids;
}

}  // namespace

Eigen::VectorXd DiscreteSpaces::expand_velocity(const Eigen::VectorXd& free) const {
    return R_u * free;
}
Eigen::VectorXd DiscreteSpaces::expand_temperature(const Eigen::VectorXd& free) const {
    return R_th * free;
}
Eigen::VectorXd DiscreteSpaces::restrict_velocity(const Eigen::VectorXd& full) const {
    return R_u.transpose() * full;
}
Eigen::VectorXd DiscreteSpaces::restrict_temperature(const Eigen::VectorXd& full) const {
    return R_th.transpose() * full;
}

DiscreteSpaces build_spaces(const Mesh& mesh) {
    {
        const auto report = validate_mesh(mesh);
        if (!report.ok())
            throw std::invalid_argument("build_spaces: invalid mesh: " + report.violations.front());
    }
    bool has_gamma0 = false;
    for (const auto& e : mesh.boundary_edges)
        if (e.tag == BoundaryTag::gamma0) has_gamma0 = true;
    if (!has_gamma0) throw std::invalid_argument("build_spaces: gamma0 is empty");

    DiscreteSpaces sp;
    sp.mesh = mesh;
    sp.n_vertices = static_cast<int>(mesh.vertices.size());
    const auto edge_ids = enumerate_edges(mesh);
    sp.n_edges = static_cast<int>(edge_ids.size());
    sp.n_p2 = sp.n_vertices + sp.n_edges;
    sp.n_pressure = sp.n_vertices;

    sp.p2_xy.resize(sp.n_p2);
    for (int v = 0; v < sp.n_vertices; ++v) sp.p2_xy[v] = mesh.vertices[v];
    for (const auto& [edge, id] : edge_ids)
        sp.p2_xy[sp.n_vertices + id] = 0.5 * (mesh.vertices[edge[0]] + mesh.vertices[edge[1]]);

    auto edge_node = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        return sp.n_vertices + edge_ids.at({a, b});
    };

    sp.tri_p2.resize(mesh.triangles.size());
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const auto& tri = mesh.triangles[t];
        sp.tri_p2[t] = {tri[0],
                        tri[1],
                        tri[2],
                        edge_node(tri[0], tri[1]),
                        edge_node(tri[1], tri[2]),
                        edge_node(tri[0], tri[2])};
    }

    sp.boundary_edge_p2.resize(mesh.boundary_edges.size());
    for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
        const auto& seg = mesh.boundary_edges[e];
        sp.boundary_edge_p2[e] = {seg.v0, seg.v1, edge_node(seg.v0, seg.v1)};
    }

    // node classification: gamma0 wins over gamma1, two independent gamma1
    // normals pin the node completely
    std::vector<char> on_gamma0(sp.n_p2, 0);
    std::vector<std::vector<Vec2>> gamma1_normals(sp.n_p2);
    for (size_t e = 0; e < mesh.boundary_edges.size(); ++e) {
        const auto& seg = mesh.boundary_edges[e];
        for (int node : sp.boundary_edge_p2[e]) {
            if (seg.tag == BoundaryTag::gamma0) {
                on_gamma0[node] = 1;
            } else {
                auto& list = gamma1_normals[node];
                bool dup = false;
                for (const auto& n : list)
                    if ((n - seg.normal).norm() < 1e-12) dup = true;
                if (!dup) list.push_back(seg.normal);
            }
        }
    }

    sp.vel_frame.assign(sp.n_p2, NodeFrame{});
    std::vector<char> th_fixed(sp.n_vertices, 0);
    for (int node = 0; node < sp.n_p2; ++node) {
        NodeFrame& frame = sp.vel_frame[node];
        if (on_gamma0[node]) {
            frame.fixed0 = frame.fixed1 = true;
            if (node < sp.n_vertices) th_fixed[node] = 1;
        } else if (!gamma1_normals[node].empty()) {
            if (gamma1_normals[node].size() >= 2) {
                frame.fixed0 = frame.fixed1 = true;  // corner of two gamma1 sides
            } else {
                const Vec2 nu = gamma1_normals[node][0];
                frame.Q.col(0) = nu;
                frame.Q.col(1) = Vec2(nu.y(), -nu.x());
                frame.fixed0 = true;  // normal component
            }
        }
    }

    // selection/rotation matrix for velocity
    {
        std::vector<Eigen::Triplet<double>> trips;
        int col = 0;
        for (int node = 0; node < sp.n_p2; ++node) {
            const NodeFrame& f = sp.vel_frame[node];
            for (int l = 0; l < 2; ++l) {
                if ((l == 0 && f.fixed0) || (l == 1 && f.fixed1)) continue;
                trips.emplace_back(2 * node + 0, col, f.Q(0, l));
                trips.emplace_back(2 * node + 1, col, f.Q(1, l));
                ++col;
            }
        }
        sp.n_u_free = col;
        sp.R_u.resize(2 * sp.n_p2, sp.n_u_free);
        sp.R_u.setFromTriplets(trips.begin(), trips.end());
        sp.R_u.prune(0.0);
        sp.R_u.makeCompressed();
    }

    // temperature selection
    {
        std::vector<Eigen::Triplet<double>> trips;
        sp.th_free_index.assign(sp.n_vertices, -1);
        int col = 0;
        for (int v = 0; v < sp.n_vertices; ++v) {
            if (th_fixed[v]) continue;
            sp.th_free_index[v] = col;
            trips.emplace_back(v, col, 1.0);
            ++col;
        }
        sp.n_th_free = col;
        sp.R_th.resize(sp.n_vertices, sp.n_th_free);
        sp.R_th.setFromTriplets(trips.begin(), trips.end());
        sp.R_th.makeCompressed();
    }

    return sp;
}

double max_generalized_eigenvalue(const SpMat& M, const SpMat& A, EigenMethod method) {
    if (method == EigenMethod::dense) {
        const Eigen::MatrixXd Md(M), Ad(A);
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Md, Ad,
                                                                     Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("max_generalized_eigenvalue: dense solver failed");
        return es.eigenvalues().maxCoeff();
    }
    Eigen::SimplicialLDLT<SpMat> ldlt(A);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("max_generalized_eigenvalue: energy Gram not SPD");
    Eigen::VectorXd x = Eigen::VectorXd::Ones(A.rows());
    for (int i = 0; i < x.size(); ++i) x[i] += 1e-3 * std::sin(1.0 + i);  // deterministic seed
    double lambda = 0.0;
    for (int it = 0; it < 20000; ++it) {
        Eigen::VectorXd y = ldlt.solve(M * x);
        const double ynorm = y.norm();
        if (ynorm == 0.0) return 0.0;  // M annihilates the iterate
        y /= ynorm;
        const double num = y.dot(M * y);
        const double den = y.dot(A * y);
        const double next = num / den;
        if (it > 4 && std::abs(next - lambda) <= 1e-13 * std::max(1.0, std::abs(next))) {
            return next;
        }
        lambda = next;
        x = y;
    }
    return lambda;
}

double estimate_trace_norm(const DiscreteSpaces& spaces, TraceSpace which, EigenMethod method) {
    if (!spaces.mesh.has_gamma1()) return 0.0;
    const Gamma1Quad quad = build_gamma1_quad(spaces);
    if (which == TraceSpace::velocity) {
        const SpMat gram = reduce(spaces.R_u, assemble_velocity_trace_gram(spaces, quad));
        const SpMat energy = reduce(spaces.R_u, assemble_velocity_a0(spaces, 1.0));
        return std::sqrt(std::max(0.0, max_generalized_eigenvalue(gram, energy, method)));
    }
    const SpMat gram = reduce(spaces.R_th, assemble_temperature_trace_gram(spaces, quad));
    const SpMat energy = reduce(spaces.R_th, SpMat(assemble_temperature_stiffness(spaces) +
                                                   assemble_temperature_mass(spaces)));
    return std::sqrt(std::max(0.0, max_generalized_eigenvalue(gram, energy, method)));
}

TraceNorms estimate_trace_norms(const DiscreteSpaces& spaces) {
    TraceNorms norms;
    if (!spaces.mesh.has_gamma1()) {
        norms.gamma1_empty = true;
        return norms;
    }
    const EigenMethod method =
        (spaces.n_u_free <= 700) ? EigenMethod::dense : EigenMethod::power;
    norms.velocity = estimate_trace_norm(spaces, TraceSpace::velocity, method);
    norms.temperature = estimate_trace_norm(spaces, TraceSpace::temperature, method);
    return norms;
}

}  // namespace bouss
