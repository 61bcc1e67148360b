#pragma once

#include "bouss/errors.hpp"
#include "bouss/forms.hpp"

#include <functional>
#include <memory>

namespace bouss {

struct FieldState {
    double t = 0.0;
    Eigen::VectorXd u;      // free velocity coefficients
    Eigen::VectorXd p;      // pressure at vertices, zero mean
    Eigen::VectorXd theta;  // free temperature coefficients
    std::vector<double> xi;   // friction multiplier at gamma1 quad points
    std::vector<double> xi1;  // heat-flux multiplier at gamma1 quad points
};

// All computed states, indexed by step. Lagged retrieval clamps to the
// initial state, mirroring g_h(t) = g(t-h) for t > h and g(0) on [0,h].
class HistoryBuffer {
public:
    void push(FieldState state) { states_.push_back(std::move(state)); }
    const FieldState& at(int n) const { return states_.at(static_cast<size_t>(n)); }
    int size() const { return static_cast<int>(states_.size()); }
    const std::vector<FieldState>& states() const { return states_; }
    std::vector<FieldState>&& take() { return std::move(states_); }

private:
    std::vector<FieldState> states_;
};

const FieldState& retard(const HistoryBuffer& buffer, int n, int lag);

// config-expressible scalar heat source g(x, t)
struct SourceSpec {
    enum class Kind { zero, constant, hotspot } kind = Kind::zero;
    double value = 0.0;                 // constant
    double amplitude = 0.0;             // hotspot
    Vec2 center = Vec2(0.5, 0.5);
    double width = 0.1;
    double eval(const Vec2& x, double t) const;
    bool is_zero() const;
};

struct OutputOptions {
    std::string monitor_csv = "monitor.csv";
    int fields_every = 0;  // 0: only the final snapshot
    std::string format = "csv";  // csv | vtu
};

struct SimConfig {
    // mesh
    int nx = 8, ny = 8;
    std::set<Side> gamma1_sides;
    // physics
    double alpha = 1.0;
    ConductivitySpec conductivity{ConductivitySpec::Constant{1.0}, 0.5, 1.0, 0.0};
    BuoyancySpec buoyancy;
    SourceSpec source_g;
    // laws
    PiecewiseLaw friction = law_zero();
    PiecewiseLaw heat_flux = law_zero();
    int mollification_m = 8;
    // time
    double T = 1.0;
    double dt = 1.0 / 64;
    int lag = 1;
    // solver
    double picard_tol = 1e-8;
    int picard_max = 50;
    double linear_tol = 1e-10;
    // law constant certification window
    double law_range = 10.0;
    int law_grid = 2001;
    bool allow_h0_failure = false;

    OutputOptions output;

    // programmatic hooks; not part of the JSON surface
    std::function<Vec2(const Vec2&, double)> body_force;
    std::function<Vec2(const Vec2&)> initial_velocity;
    std::function<double(const Vec2&)> initial_temperature;
    std::function<double(const Vec2&, double)> source_override;

    int steps() const;
    double lag_time() const { return lag * dt; }  // the retardation h
    void validate() const;                        // throws config_error
};

struct MonitorRecord {
    int step = 0;
    double t = 0.0;
    double kinetic = 0.0;         // 0.5 ||u||^2_Mu
    double thermal = 0.0;         // 0.5 ||theta||^2_Mth
    double visc_increment = 0.0;  // dt * a0(u,u)
    double therm_increment = 0.0; // dt * b0(theta_lag; theta, theta)
    double reg_increment = 0.0;   // dt * h * <G theta, theta>
    double bd_work_u = 0.0;       // dt * <xi, u_tau>_quad
    double bd_work_th = 0.0;      // dt * <xi1, theta>_quad
    int picard_u = 0;
    int picard_th = 0;
    double slack_u = 0.0;   // energy-inequality slack, >= -1e-9 * scale
    double slack_th = 0.0;
    double slack_scale_u = 0.0;
    double slack_scale_th = 0.0;
    double div_residual = 0.0;      // ||C u||
    double conv_residual_u = 0.0;   // u^T Ntilde u (exact zero up to roundoff)
    double conv_residual_th = 0.0;
    double u_E_sq = 0.0;    // Korn energy u^T A0(1) u
    double th_V_sq = 0.0;   // theta^T (K + M) theta
    double u_L2_sq = 0.0;
    double th_L2_sq = 0.0;
    double xi_l2_sq = 0.0;   // sum w xi^2
    double xi1_l2_sq = 0.0;
    double xi_growth_max = 0.0;   // max |xi| / (1 + |u_tau|)
    double xi1_growth_max = 0.0;
    double p_mean_abs = 0.0;
};

struct EnergyConstants {
    double alpha = 0.0;
    double delta = 0.0;
    double gamma_s = 0.0;
    double gamma = 0.0;
    double c0 = 0.0, m1 = 0.0;
    double c1 = 0.0;
    double buoyancy_l2 = 0.0;  // beta |e|
    double gamma1_len = 0.0;
    int m_level = 1;
    double poincare_u = 0.0;   // ||v||_L2 <= poincare_u ||v||_E
    double poincare_th = 0.0;  // lambda_max(M_th, K_th)
};

struct RunResult {
    std::vector<FieldState> trajectory;  // states 0..N
    std::vector<MonitorRecord> monitors; // one per step
    EnergyConstants constants;
    H0Report h0;
    std::vector<std::string> warnings;
};

struct VelocityStepResult {
    Eigen::VectorXd u, p;
    std::vector<double> xi;        // multiplier entering the final solve
    std::vector<double> xi_trace;  // the trace it was evaluated at
    int picard = 0;
    double div_residual = 0.0;
    double conv_energy = 0.0;  // u^T Ntilde(u_prev) u, zero up to roundoff
};

struct TemperatureStepResult {
    Eigen::VectorXd theta;
    std::vector<double> xi1;
    std::vector<double> xi1_trace;
    int picard = 0;
    double conv_energy = 0.0;
    double b0_energy = 0.0;   // theta^T B0(theta_lag) theta
    double reg_energy = 0.0;  // h theta^T G(theta_lag) theta
};

class Simulation {
public:
    explicit Simulation(SimConfig cfg);
    Simulation(SimConfig cfg, Mesh mesh);

    const SimConfig& config() const { return cfg_; }
    const Mesh& mesh() const { return spaces_.mesh; }
    const DiscreteSpaces& spaces() const { return spaces_; }
    const OperatorSet& ops() const { return ops_; }
    const EnergyConstants& constants() const { return constants_; }
    const H0Report& h0() const { return h0_; }
    const TraceNorms& trace_norms() const { return norms_; }
    const MollifiedLaw& friction_law() const { return friction_m_; }
    const MollifiedLaw& heat_flux_law() const { return heat_flux_m_; }

    FieldState initial_state() const;

    // backward-Euler Oseen step of the mixed velocity system with Picard on
    // the mollified friction term
    VelocityStepResult step_velocity(const FieldState& prev,
                                     const Eigen::VectorXd& theta_lagged_free,
                                     double t_new) const;
    // temperature step with lagged conductivity/convection coefficients and
    // the h-weighted lagged p-Laplacian regularizer
    TemperatureStepResult step_temperature(const FieldState& prev,
                                           const Eigen::VectorXd& u_lagged_free,
                                           const Eigen::VectorXd& theta_lagged_free,
                                           double t_new) const;

    RunResult run() const;

private:
    SimConfig cfg_;
    DiscreteSpaces spaces_;
    OperatorSet ops_;
    MollifiedLaw friction_m_, heat_flux_m_;
    LawConstants friction_const_, heat_flux_const_;
    TraceNorms norms_;
    H0Report h0_;
    EnergyConstants constants_;

    Eigen::VectorXd buoyancy_load(const Eigen::VectorXd& theta_lagged_free) const;
    Eigen::VectorXd body_load(double t) const;
    Eigen::VectorXd heat_load(double t) const;
    double source_l2(double t) const;
    MonitorRecord make_monitor(int step, const FieldState& prev, const FieldState& next,
                               const Eigen::VectorXd& theta_lag_free,
                               const Eigen::VectorXd& u_lag_free,
                               const VelocityStepResult& vres,
                               const TemperatureStepResult& tres) const;
};

void write_monitor_csv(const std::vector<MonitorRecord>& monitors, std::ostream& os);

}  // namespace bouss
