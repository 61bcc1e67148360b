#pragma once

#include "bouss/laws.hpp"
#include "bouss/quadrature.hpp"
#include "bouss/spaces.hpp"

#include <functional>

namespace bouss {

// reference-element bases mapped to a physical triangle
struct P2Eval {
    std::array<double, 6> shape;
    std::array<Vec2, 6> grad;
};
struct P1Eval {
    std::array<double, 3> shape;
    std::array<Vec2, 3> grad;
};

P2Eval eval_p2(const Vec2& a, const Vec2& b, const Vec2& c, double xi, double eta);
P1Eval eval_p1(const Vec2& a, const Vec2& b, const Vec2& c, double xi, double eta);

// All assemblers below act on the full (unconstrained, global-frame) dof
// sets: velocity dof 2*node+component on P2 nodes, temperature/pressure dofs
// on vertices. Constraints are applied afterwards through reduce()/R.

// a0(u,v) = (alpha/2) sum_ij int (d_i u_j + d_j u_i)(d_i v_j + d_j v_i)
SpMat assemble_velocity_a0(const DiscreteSpaces& sp, double alpha);
SpMat assemble_velocity_mass(const DiscreteSpaces& sp);
SpMat assemble_temperature_mass(const DiscreteSpaces& sp);
SpMat assemble_temperature_stiffness(const DiscreteSpaces& sp);  // int grad.grad
// c(v,q) = -int (div v) q; rows pressure, cols velocity
SpMat assemble_divergence(const DiscreteSpaces& sp);
// b0(mu; eta, zeta) = int k(mu) grad eta . grad zeta, mu given at vertices
SpMat assemble_b0(const DiscreteSpaces& sp, const ConductivitySpec& k,
                  const Eigen::VectorXd& mu_vertex);
// plain a1 matrix: entry(i,j) = a1(w, phi_j, phi_i); w full velocity coeffs
SpMat assemble_convection_velocity(const DiscreteSpaces& sp, const Eigen::VectorXd& w_full);
// plain b1 matrix: entry(i,j) = b1(w, eta_j, zeta_i)
SpMat assemble_convection_temperature(const DiscreteSpaces& sp, const Eigen::VectorXd& w_full);
// lagged p-Laplacian: int |grad theta_lag|^2 grad phi_i . grad phi_j
SpMat assemble_p_laplacian(const DiscreteSpaces& sp, const Eigen::VectorXd& theta_vertex);
// scalar P2 x P1 mass, for loads built from P1 coefficient fields
SpMat assemble_mixed_mass(const DiscreteSpaces& sp);

SpMat skew_part(const SpMat& A);  // (A - A^T)/2

Eigen::VectorXd assemble_velocity_load(const DiscreteSpaces& sp,
                                       const std::function<Vec2(const Vec2&)>& f);
Eigen::VectorXd assemble_temperature_load(const DiscreteSpaces& sp,
                                          const std::function<double(const Vec2&)>& f);
double l2_norm_sq(const DiscreteSpaces& sp, const std::function<double(const Vec2&)>& f);

SpMat reduce(const SpMat& R, const SpMat& A);  // R^T A R

// ---- Gamma1 boundary machinery -----------------------------------------

struct Gamma1QuadPoint {
    Vec2 x;
    double w = 0.0;
    Vec2 normal, tangent;
    int edge = -1;                     // index into mesh.boundary_edges
    std::array<int, 3> vel_nodes{};    // P2 nodes of the edge: v0, v1, mid
    std::array<double, 3> vel_shape{};
    std::array<int, 2> th_nodes{};
    std::array<double, 2> th_shape{};
};

struct Gamma1Quad {
    std::vector<Gamma1QuadPoint> points;
    double measure = 0.0;  // |Gamma1|
    int points_per_edge = 0;
};

Gamma1Quad build_gamma1_quad(const DiscreteSpaces& sp, int points_per_edge = 4);

// vector trace Gram (gamma_s u, gamma_s v)_{L^2(Gamma1)^2} on velocity dofs
SpMat assemble_velocity_trace_gram(const DiscreteSpaces& sp, const Gamma1Quad& quad);
SpMat assemble_temperature_trace_gram(const DiscreteSpaces& sp, const Gamma1Quad& quad);

// tangential velocity trace u.tau / temperature trace at the quad points
std::vector<double> tangential_trace(const DiscreteSpaces& sp, const Gamma1Quad& quad,
                                     const Eigen::VectorXd& u_full);
std::vector<double> temperature_trace(const DiscreteSpaces& sp, const Gamma1Quad& quad,
                                      const Eigen::VectorXd& theta_vertex);

struct BoundaryResidual {
    Eigen::VectorXd r_full;          // v -> int_G1 Dj_m(s) (v_tau or v)
    std::vector<double> multiplier;  // Dj_m(s) per quad point
    std::vector<double> trace;       // s per quad point
};

// friction: s = u.tau, residual tested against v.tau
BoundaryResidual boundary_nonsmooth_residual_velocity(const DiscreteSpaces& sp,
                                                      const Gamma1Quad& quad,
                                                      const MollifiedLaw& law,
                                                      const Eigen::VectorXd& u_full);
// heat flux: s = theta, residual tested against zeta
BoundaryResidual boundary_nonsmooth_residual_temperature(const DiscreteSpaces& sp,
                                                         const Gamma1Quad& quad,
                                                         const MollifiedLaw& law,
                                                         const Eigen::VectorXd& theta_vertex);

// Precomputed mesh-level operators for the time stepper. Reduced matrices
// live on free dofs; *_full on the unconstrained sets.
struct OperatorSet {
    SpMat A0_full, A0korn_full, Mu_full, Mth_full, Kth_full, C_full, Mx_full;
    SpMat A0, A0korn, Mu, Mth, Kth;
    SpMat C;                  // n_pressure x n_u_free
    Eigen::VectorXd p_area;   // int psi_q, the zero-mean constraint row
    Gamma1Quad gamma1;
    double alpha = 0.0;
};

OperatorSet assemble_operators(const DiscreteSpaces& sp, double alpha);

}  // namespace bouss
