#pragma once

#include "bouss/laws.hpp"
#include "bouss/mesh.hpp"

#include <Eigen/SparseCore>

namespace bouss {

using SpMat = Eigen::SparseMatrix<double>;

// Local orthonormal frame of a velocity node. Column 0/1 of Q are the
// directions of the two local dofs in global coordinates; a fixed local dof
// is constrained to zero. Interior nodes have Q = I and both dofs free;
// gamma1 nodes have Q = [nu tau] with the nu component fixed.
struct NodeFrame {
    Eigen::Matrix2d Q = Eigen::Matrix2d::Identity();
    bool fixed0 = false;
    bool fixed1 = false;
};

// Taylor-Hood discretization: quadratic velocity per component, linear
// pressure and temperature. P2 nodes are the vertices followed by the edge
// midpoints.
struct DiscreteSpaces {
    Mesh mesh;

    int n_vertices = 0;
    int n_edges = 0;
    int n_p2 = 0;
    std::vector<Vec2> p2_xy;
    std::vector<std::array<int, 6>> tri_p2;  // v0 v1 v2, then mid(01) mid(12) mid(02)
    // per boundary edge: [v0, v1, midpoint] as P2 node indices
    std::vector<std::array<int, 3>> boundary_edge_p2;

    std::vector<NodeFrame> vel_frame;  // per P2 node
    SpMat R_u;                         // (2 n_p2) x n_u_free, global = R_u * free
    int n_u_free = 0;

    std::vector<int> th_free_index;  // per vertex, -1 when constrained
    SpMat R_th;                      // n_vertices x n_th_free
    int n_th_free = 0;

    int n_pressure = 0;  // all vertices

    Eigen::VectorXd expand_velocity(const Eigen::VectorXd& free) const;
    Eigen::VectorXd expand_temperature(const Eigen::VectorXd& free) const;
    Eigen::VectorXd restrict_velocity(const Eigen::VectorXd& full) const;   // R^T full
    Eigen::VectorXd restrict_temperature(const Eigen::VectorXd& full) const;
};

// Builds dof maps, constraint frames and free index sets. gamma0 nodes are
// fully fixed (Dirichlet wins at gamma0/gamma1 corners); gamma1 nodes with
// two independent normals (gamma1/gamma1 corners) are fully fixed too.
DiscreteSpaces build_spaces(const Mesh& mesh);

enum class TraceSpace { velocity, temperature };
enum class EigenMethod { dense, power };

// ||trace||: the square root of the largest generalized eigenvalue of
// (Gamma1 trace Gram) v = lambda (energy Gram) v on free dofs. The velocity
// energy is the Korn form (a0 with alpha = 1); the temperature energy the
// full H^1 inner product. Returns 0 when gamma1 is empty.
double estimate_trace_norm(const DiscreteSpaces& spaces, TraceSpace which,
                           EigenMethod method = EigenMethod::power);

// both norms; dense path on small meshes, power iteration otherwise
TraceNorms estimate_trace_norms(const DiscreteSpaces& spaces);

// largest generalized eigenvalue of M x = lambda A x (both reduced, A SPD)
double max_generalized_eigenvalue(const SpMat& M, const SpMat& A, EigenMethod method);

}  // namespace bouss
