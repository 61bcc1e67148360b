#include "bouss/integrator.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <ostream>
#include <sstream>

namespace bouss {

namespace {

// [[A, C^T, 0], [C, 0, a], [0, a^T, 0]] -- mixed system with the zero-mean
// pressure row
SpMat build_saddle(const SpMat& A, const SpMat& C, const Eigen::VectorXd& area) {
    const int nu = static_cast<int>(A.rows());
    const int np = static_cast<int>(C.rows());
    const int n = nu + np + 1;
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(A.nonZeros() + 2 * C.nonZeros() + 2 * np));
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it)
            trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    for (int k = 0; k < C.outerSize(); ++k)
        for (SpMat::InnerIterator it(C, k); it; ++it) {
            trips.emplace_back(nu + static_cast<int>(it.row()), static_cast<int>(it.col()),
                               it.value());
            trips.emplace_back(static_cast<int>(it.col()), nu + static_cast<int>(it.row()),
                               it.value());
        }
    for (int i = 0; i < np; ++i) {
        trips.emplace_back(nu + i, nu + np, area[i]);
        trips.emplace_back(nu + np, nu + i, area[i]);
    }
    SpMat K(n, n);
    K.setFromTriplets(trips.begin(), trips.end());
    K.makeCompressed();
    return K;
}

double quad_l2_sq(const Gamma1Quad& quad, const std::vector<double>& values) {
    double s = 0.0;
    for (size_t i = 0; i < quad.points.size(); ++i)
        s += quad.points[i].w * values[i] * values[i];
    return s;
}

double quad_pairing(const Gamma1Quad& quad, const std::vector<double>& a,
                    const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < quad.points.size(); ++i) s += quad.points[i].w * a[i] * b[i];
    return s;
}

}  // namespace

const FieldState& retard(const HistoryBuffer& buffer, int n, int lag) {
    return buffer.at(std::max(n - lag, 0));
}

double SourceSpec::eval(const Vec2& x, double t) const {
    (void)t;
    switch (kind) {
        case Kind::zero: return 0.0;
        case Kind::constant: return value;
        case Kind::hotspot: {
            const double r2 = (x - center).squaredNorm();
            return amplitude * std::exp(-r2 / (width * width));
        }
    }
    return 0.0;
}

bool SourceSpec::is_zero() const {
    return kind == Kind::zero || (kind == Kind::constant && value == 0.0) ||
           (kind == Kind::hotspot && amplitude == 0.0);
}

int SimConfig::steps() const { return static_cast<int>(std::llround(T / dt)); }

void SimConfig::validate() const {
    auto fail = [](const std::string& msg) { throw config_error(msg); };
    if (nx < 1 || ny < 1) fail("mesh.nx and mesh.ny must be >= 1");
    if (gamma1_sides.size() >= 4) fail("mesh.gamma1_sides leaves gamma0 empty");
    if (!(alpha > 0.0)) fail("physics.alpha must be positive");
    if (!(dt > 0.0)) fail("time.dt must be positive");
    if (T < dt) fail("time.T must be at least dt");
    const double n = T / dt;
    if (std::abs(n - std::llround(n)) > 1e-9 * std::max(1.0, n))
        fail("time.T must be an integer multiple of time.dt");
    if (lag < 1) fail("time.lag must be >= 1");
    if (mollification_m < 1) fail("laws.mollification_m must be >= 1");
    if (!(picard_tol > 0.0)) fail("solver.picard_tol must be positive");
    if (picard_max < 1) fail("solver.picard_max must be >= 1");
    if (!(linear_tol > 0.0)) fail("solver.linear_tol must be positive");
    if (!(law_range > 0.0) || law_grid < 100) fail("law certification grid degenerate");
    for (const auto& msg : conductivity.check()) fail(msg);
    try {
        friction.check_valid();
        heat_flux.check_valid();
    } catch (const std::invalid_argument& e) {
        fail(e.what());
    }
}

Simulation::Simulation(SimConfig cfg)
    : Simulation(cfg, build_rect_mesh(cfg.nx, cfg.ny, BoundaryTagging{cfg.gamma1_sides})) {}

Simulation::Simulation(SimConfig cfg, Mesh mesh) : cfg_(std::move(cfg)) {
    cfg_.validate();
    spaces_ = build_spaces(mesh);
    ops_ = assemble_operators(spaces_, cfg_.alpha);
    friction_m_ = mollify(cfg_.friction, cfg_.mollification_m);
    heat_flux_m_ = mollify(cfg_.heat_flux, cfg_.mollification_m);
    friction_const_ = estimate_constants(cfg_.friction, cfg_.law_range, cfg_.law_grid);
    heat_flux_const_ = estimate_constants(cfg_.heat_flux, cfg_.law_range, cfg_.law_grid);
    norms_ = estimate_trace_norms(spaces_);
    h0_ = check_H0(friction_const_, heat_flux_const_, cfg_.alpha, cfg_.conductivity.delta,
                   norms_);

    constants_.alpha = cfg_.alpha;
    constants_.delta = cfg_.conductivity.delta;
    constants_.gamma_s = norms_.velocity;
    constants_.gamma = norms_.temperature;
    constants_.c0 = friction_const_.c0;
    constants_.m1 = friction_const_.m1;
    constants_.c1 = heat_flux_const_.c0;
    constants_.buoyancy_l2 = cfg_.buoyancy.l2_operator_norm();
    constants_.gamma1_len = ops_.gamma1.measure;
    constants_.m_level = cfg_.mollification_m;
    constants_.poincare_u =
        std::sqrt(std::max(0.0, max_generalized_eigenvalue(
                                    ops_.Mu, ops_.A0korn,
                                    spaces_.n_u_free <= 700 ? EigenMethod::dense
                                                            : EigenMethod::power)));
    constants_.poincare_th =
        std::sqrt(std::max(0.0, max_generalized_eigenvalue(
                                    ops_.Mth, ops_.Kth,
                                    spaces_.n_th_free <= 700 ? EigenMethod::dense
                                                             : EigenMethod::power)));
}

Eigen::VectorXd Simulation::buoyancy_load(const Eigen::VectorXd& theta_lagged_free) const {
    const Eigen::VectorXd theta_vertex = spaces_.expand_temperature(theta_lagged_free);
    const Eigen::VectorXd moments = ops_.Mx_full * theta_vertex;  // int theta N_a
    Eigen::VectorXd full = Eigen::VectorXd::Zero(2 * spaces_.n_p2);
    const Vec2 dir = cfg_.buoyancy.beta * cfg_.buoyancy.direction;
    for (int a = 0; a < spaces_.n_p2; ++a) {
        full[2 * a + 0] = dir.x() * moments[a];
        full[2 * a + 1] = dir.y() * moments[a];
    }
    return spaces_.restrict_velocity(full);
}

Eigen::VectorXd Simulation::body_load(double t) const {
    if (!cfg_.body_force) return Eigen::VectorXd::Zero(spaces_.n_u_free);
    const auto f = [&](const Vec2& x) { return cfg_.body_force(x, t); };
    return spaces_.restrict_velocity(assemble_velocity_load(spaces_, f));
}

Eigen::VectorXd Simulation::heat_load(double t) const {
    if (!cfg_.source_override && cfg_.source_g.is_zero())
        return Eigen::VectorXd::Zero(spaces_.n_th_free);
    const auto f = [&](const Vec2& x) {
        return cfg_.source_override ? cfg_.source_override(x, t) : cfg_.source_g.eval(x, t);
    };
    return spaces_.restrict_temperature(assemble_temperature_load(spaces_, f));
}

double Simulation::source_l2(double t) const {
    if (!cfg_.source_override && cfg_.source_g.is_zero()) return 0.0;
    const auto f = [&](const Vec2& x) {
        return cfg_.source_override ? cfg_.source_override(x, t) : cfg_.source_g.eval(x, t);
    };
    return std::sqrt(l2_norm_sq(spaces_, f));
}

FieldState Simulation::initial_state() const {
    FieldState s;
    s.t = 0.0;
    s.p = Eigen::VectorXd::Zero(spaces_.n_pressure);

    Eigen::VectorXd theta_full = Eigen::VectorXd::Zero(spaces_.n_vertices);
    if (cfg_.initial_temperature)
        for (int v = 0; v < spaces_.n_vertices; ++v)
            theta_full[v] = cfg_.initial_temperature(spaces_.mesh.vertices[v]);
    s.theta = spaces_.restrict_temperature(theta_full);

    if (cfg_.initial_velocity) {
        Eigen::VectorXd u_full = Eigen::VectorXd::Zero(2 * spaces_.n_p2);
        for (int a = 0; a < spaces_.n_p2; ++a) {
            const Vec2 v = cfg_.initial_velocity(spaces_.p2_xy[a]);
            u_full[2 * a + 0] = v.x();
            u_full[2 * a + 1] = v.y();
        }
        // interpolate, constrain, then L2-project onto the discretely
        // divergence-free subspace
        const Eigen::VectorXd u_red = spaces_.restrict_velocity(u_full);
        const SpMat K = build_saddle(ops_.Mu, ops_.C, ops_.p_area);
        Eigen::SparseLU<SpMat> lu(K);
        if (lu.info() != Eigen::Success)
            throw solver_error("initial projection: saddle factorization failed");
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(K.rows());
        rhs.head(spaces_.n_u_free) = ops_.Mu * u_red;
        const Eigen::VectorXd sol = lu.solve(rhs);
        s.u = sol.head(spaces_.n_u_free);
    } else {
        s.u = Eigen::VectorXd::Zero(spaces_.n_u_free);
    }

    const auto& quad = ops_.gamma1;
    const auto s_tau = tangential_trace(spaces_, quad, spaces_.expand_velocity(s.u));
    const auto s_th = temperature_trace(spaces_, quad, spaces_.expand_temperature(s.theta));
    s.xi.resize(quad.points.size());
    s.xi1.resize(quad.points.size());
    for (size_t i = 0; i < quad.points.size(); ++i) {
        s.xi[i] = friction_m_.deriv(s_tau[i]);
        s.xi1[i] = heat_flux_m_.deriv(s_th[i]);
    }
    return s;
}

VelocityStepResult Simulation::step_velocity(const FieldState& prev,
                                             const Eigen::VectorXd& theta_lagged_free,
                                             double t_new) const {
    const int nu = spaces_.n_u_free;
    const int np = spaces_.n_pressure;
    const double dt = cfg_.dt;

    const SpMat Ntil = reduce(
        spaces_.R_u, skew_part(assemble_convection_velocity(spaces_, spaces_.expand_velocity(prev.u))));
    SpMat A = SpMat(ops_.Mu * (1.0 / dt)) + ops_.A0 + Ntil;
    const SpMat K = build_saddle(A, ops_.C, ops_.p_area);
    Eigen::SparseLU<SpMat> lu(K);
    if (lu.info() != Eigen::Success)
        throw solver_error("velocity step: singular saddle system (constraint setup error?)");

    const Eigen::VectorXd base =
        ops_.Mu * prev.u * (1.0 / dt) + buoyancy_load(theta_lagged_free) + body_load(t_new);

    const bool trivial_law = friction_m_.is_zero() || ops_.gamma1.points.empty();
    VelocityStepResult out;
    Eigen::VectorXd u_iter = prev.u;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(K.rows());
    std::vector<double> diff_history;

    for (int k = 0; k < cfg_.picard_max; ++k) {
        BoundaryResidual res;
        if (trivial_law) {
            res.r_full = Eigen::VectorXd::Zero(2 * spaces_.n_p2);
            res.multiplier.assign(ops_.gamma1.points.size(), 0.0);
            res.trace = tangential_trace(spaces_, ops_.gamma1, spaces_.expand_velocity(u_iter));
        } else {
            res = boundary_nonsmooth_residual_velocity(spaces_, ops_.gamma1, friction_m_,
                                                       spaces_.expand_velocity(u_iter));
        }
        rhs.setZero();
        rhs.head(nu) = base - spaces_.restrict_velocity(res.r_full);
        const Eigen::VectorXd sol = lu.solve(rhs);
        const Eigen::VectorXd u_new = sol.head(nu);
        const Eigen::VectorXd d = u_new - u_iter;
        const double diff = std::sqrt(std::max(0.0, d.dot(ops_.Mu * d)));
        diff_history.push_back(diff);
        out.picard = k + 1;
        if (trivial_law || diff <= cfg_.picard_tol) {
            out.u = u_new;
            out.p = sol.segment(nu, np);
            out.xi = res.multiplier;
            out.xi_trace = res.trace;
            out.div_residual = (ops_.C * u_new).norm();
            out.conv_energy = u_new.dot(Ntil * u_new);
            return out;
        }
        // fallback damping once the undamped iteration has had its chance
        if (k >= 10)
            u_iter += 0.5 * d;
        else
            u_iter = u_new;
    }

    std::ostringstream msg;
    msg << "velocity step at t=" << t_new << ": Picard did not converge within "
        << cfg_.picard_max << " iterations (tol " << cfg_.picard_tol << "); diffs:";
    for (double d : diff_history) msg << " " << d;
    msg << "; consider a smaller dt or stronger damping";
    throw solver_error(msg.str());
}

TemperatureStepResult Simulation::step_temperature(const FieldState& prev,
                                                   const Eigen::VectorXd& u_lagged_free,
                                                   const Eigen::VectorXd& theta_lagged_free,
                                                   double t_new) const {
    const double dt = cfg_.dt;
    const double h = cfg_.lag_time();
    const Eigen::VectorXd theta_lag_vertex = spaces_.expand_temperature(theta_lagged_free);
    const Eigen::VectorXd u_lag_full = spaces_.expand_velocity(u_lagged_free);

    const SpMat B0r = reduce(spaces_.R_th, assemble_b0(spaces_, cfg_.conductivity, theta_lag_vertex));
    const SpMat B1s =
        reduce(spaces_.R_th, skew_part(assemble_convection_temperature(spaces_, u_lag_full)));
    const SpMat Gr = reduce(spaces_.R_th, assemble_p_laplacian(spaces_, theta_lag_vertex));
    SpMat A = SpMat(ops_.Mth * (1.0 / dt)) + B0r + B1s + SpMat(Gr * h);
    Eigen::SparseLU<SpMat> lu(A);
    if (lu.info() != Eigen::Success)
        throw solver_error("temperature step: singular system");

    const Eigen::VectorXd base = ops_.Mth * prev.theta * (1.0 / dt) + heat_load(t_new);

    const bool trivial_law = heat_flux_m_.is_zero() || ops_.gamma1.points.empty();
    TemperatureStepResult out;
    Eigen::VectorXd th_iter = prev.theta;
    std::vector<double> diff_history;

    for (int k = 0; k < cfg_.picard_max; ++k) {
        BoundaryResidual res;
        if (trivial_law) {
            res.r_full = Eigen::VectorXd::Zero(spaces_.n_vertices);
            res.multiplier.assign(ops_.gamma1.points.size(), 0.0);
            res.trace =
                temperature_trace(spaces_, ops_.gamma1, spaces_.expand_temperature(th_iter));
        } else {
            res = boundary_nonsmooth_residual_temperature(spaces_, ops_.gamma1, heat_flux_m_,
                                                          spaces_.expand_temperature(th_iter));
        }
        const Eigen::VectorXd rhs = base - spaces_.restrict_temperature(res.r_full);
        const Eigen::VectorXd th_new = lu.solve(rhs);
        const Eigen::VectorXd d = th_new - th_iter;
        const double diff = std::sqrt(std::max(0.0, d.dot(ops_.Mth * d)));
        diff_history.push_back(diff);
        out.picard = k + 1;
        if (trivial_law || diff <= cfg_.picard_tol) {
            out.theta = th_new;
            out.xi1 = res.multiplier;
            out.xi1_trace = res.trace;
            out.b0_energy = th_new.dot(B0r * th_new);
            out.reg_energy = h * th_new.dot(Gr * th_new);
            out.conv_energy = th_new.dot(B1s * th_new);
            return out;
        }
        if (k >= 10)
            th_iter += 0.5 * d;
        else
            th_iter = th_new;
    }

    std::ostringstream msg;
    msg << "temperature step at t=" << t_new << ": Picard did not converge within "
        << cfg_.picard_max << " iterations; diffs:";
    for (double d : diff_history) msg << " " << d;
    throw solver_error(msg.str());
}

MonitorRecord Simulation::make_monitor(int step, const FieldState& prev, const FieldState& next,
                                       const Eigen::VectorXd& theta_lag_free,
                                       const Eigen::VectorXd& u_lag_free,
                                       const VelocityStepResult& vres,
                                       const TemperatureStepResult& tres) const {
    (void)u_lag_free;
    const double dt = cfg_.dt;
    MonitorRecord r;
    r.step = step;
    r.t = next.t;

    r.kinetic = 0.5 * next.u.dot(ops_.Mu * next.u);
    r.thermal = 0.5 * next.theta.dot(ops_.Mth * next.theta);
    r.u_E_sq = next.u.dot(ops_.A0korn * next.u);
    r.th_V_sq = next.theta.dot((ops_.Kth * next.theta)) + next.theta.dot(ops_.Mth * next.theta);
    r.u_L2_sq = next.u.dot(ops_.Mu * next.u);
    r.th_L2_sq = next.theta.dot(ops_.Mth * next.theta);

    const double prev_kinetic = 0.5 * prev.u.dot(ops_.Mu * prev.u);
    const double prev_thermal = 0.5 * prev.theta.dot(ops_.Mth * prev.theta);
    const Eigen::VectorXd du = next.u - prev.u;
    const Eigen::VectorXd dth = next.theta - prev.theta;
    const double du_M = du.dot(ops_.Mu * du);
    const double dth_M = dth.dot(ops_.Mth * dth);

    const double visc_energy = next.u.dot(ops_.A0 * next.u);  // alpha-scaled
    r.visc_increment = dt * visc_energy;
    r.therm_increment = dt * tres.b0_energy;
    r.reg_increment = dt * tres.reg_energy;
    r.conv_residual_u = vres.conv_energy;
    r.conv_residual_th = tres.conv_energy;
    r.picard_u = vres.picard;
    r.picard_th = tres.picard;
    r.div_residual = vres.div_residual;
    r.p_mean_abs = std::abs(ops_.p_area.dot(next.p));

    const auto& quad = ops_.gamma1;
    const auto tau_plus = tangential_trace(spaces_, quad, spaces_.expand_velocity(next.u));
    const auto th_plus = temperature_trace(spaces_, quad, spaces_.expand_temperature(next.theta));
    const double W_u = quad_pairing(quad, next.xi, tau_plus);
    const double W_th = quad_pairing(quad, next.xi1, th_plus);
    r.bd_work_u = dt * W_u;
    r.bd_work_th = dt * W_th;
    r.xi_l2_sq = quad_l2_sq(quad, next.xi);
    r.xi1_l2_sq = quad_l2_sq(quad, next.xi1);
    for (size_t i = 0; i < quad.points.size(); ++i) {
        r.xi_growth_max =
            std::max(r.xi_growth_max, std::abs(next.xi[i]) / (1.0 + std::abs(tau_plus[i])));
        r.xi1_growth_max =
            std::max(r.xi1_growth_max, std::abs(next.xi1[i]) / (1.0 + std::abs(th_plus[i])));
    }

    // --- energy-inequality slack, velocity -------------------------------
    // identity: dK + 0.5||du||^2 + dt[a0(u,u) + conv + W] = dt (loads, u)
    // loads bound: |(F(th_lag) + f, u)| <= (beta|e| ||th_lag|| + ||f||) ||u||
    // boundary bound: growth of the mollified law + Cauchy-Schwarz in the
    // quadrature pairing + the trace-norm estimate
    const double sqrt2 = std::sqrt(2.0);
    const double m_inv = 1.0 / constants_.m_level;
    const double th_lag_l2 =
        std::sqrt(std::max(0.0, theta_lag_free.dot(ops_.Mth * theta_lag_free)));
    double body_l2 = 0.0;
    if (cfg_.body_force) {
        const auto f = [&](const Vec2& x) { return cfg_.body_force(x, next.t); };
        double acc = 0.0;
        acc += l2_norm_sq(spaces_, [&](const Vec2& x) { return f(x).x(); });
        acc += l2_norm_sq(spaces_, [&](const Vec2& x) { return f(x).y(); });
        body_l2 = std::sqrt(acc);
    }
    const double load_bound = constants_.buoyancy_l2 * th_lag_l2 + body_l2;
    const double u_l2 = std::sqrt(std::max(0.0, r.u_L2_sq));
    const double s_in_l2 = std::sqrt(quad_l2_sq(quad, vres.xi_trace));
    const double bw_u_bound =
        sqrt2 * constants_.c0 *
        ((1.0 + m_inv) * std::sqrt(constants_.gamma1_len) + s_in_l2) * constants_.gamma_s *
        std::sqrt(std::max(0.0, r.u_E_sq));
    // slack: rhs bound minus coercive lhs, boundary work moved across
    r.slack_u = (dt * load_bound * u_l2 + dt * bw_u_bound) -
                ((r.kinetic - prev_kinetic) + 0.5 * du_M + dt * visc_energy);
    r.slack_scale_u = std::abs(r.kinetic - prev_kinetic) + 0.5 * du_M + dt * std::abs(visc_energy) +
                      dt * std::abs(W_u) + dt * load_bound * u_l2 + dt * bw_u_bound + 1e-300;

    // --- energy-inequality slack, temperature ----------------------------
    const double g_l2 = source_l2(next.t);
    const double th_l2 = std::sqrt(std::max(0.0, r.th_L2_sq));
    const double s1_in_l2 = std::sqrt(quad_l2_sq(quad, tres.xi1_trace));
    const double bw_th_bound =
        sqrt2 * constants_.c1 *
        ((1.0 + m_inv) * std::sqrt(constants_.gamma1_len) + s1_in_l2) * constants_.gamma *
        std::sqrt(std::max(0.0, r.th_V_sq));
    r.slack_th = (dt * g_l2 * th_l2 + dt * bw_th_bound) -
                 ((r.thermal - prev_thermal) + 0.5 * dth_M + dt * tres.b0_energy +
                  dt * tres.reg_energy);
    r.slack_scale_th = std::abs(r.thermal - prev_thermal) + 0.5 * dth_M +
                       dt * std::abs(tres.b0_energy) + dt * std::abs(tres.reg_energy) +
                       dt * std::abs(W_th) + dt * g_l2 * th_l2 + dt * bw_th_bound + 1e-300;
    return r;
}

RunResult Simulation::run() const {
    RunResult result;
    result.constants = constants_;
    result.h0 = h0_;
    if (!h0_.ok()) {
        if (!cfg_.allow_h0_failure)
            throw config_error(
                "H0 smallness condition violated (margins: velocity " +
                std::to_string(h0_.velocity_margin) + ", thermal " +
                std::to_string(h0_.thermal_margin) +
                "); set allow_h0_failure to run anyway");
        result.warnings.push_back("H0 violated: energy bounds are not guaranteed");
    }

    HistoryBuffer buffer;
    buffer.push(initial_state());
    const int n_steps = cfg_.steps();
    bool range_warned = false;

    for (int n = 0; n < n_steps; ++n) {
        const double t_new = (n + 1) * cfg_.dt;
        const FieldState& lagged = retard(buffer, n + 1, cfg_.lag);
        const Eigen::VectorXd theta_lag = lagged.theta;
        const Eigen::VectorXd u_lag = lagged.u;
        const FieldState& prev = buffer.at(n);

        const VelocityStepResult vres = step_velocity(prev, theta_lag, t_new);
        const TemperatureStepResult tres = step_temperature(prev, u_lag, theta_lag, t_new);

        FieldState next;
        next.t = t_new;
        next.u = vres.u;
        next.p = vres.p;
        next.theta = tres.theta;
        next.xi = vres.xi;
        next.xi1 = tres.xi1;

        result.monitors.push_back(
            make_monitor(n + 1, prev, next, theta_lag, u_lag, vres, tres));

        if (!range_warned) {
            for (double s : vres.xi_trace)
                if (std::abs(s) > cfg_.law_range) range_warned = true;
            for (double s : tres.xi1_trace)
                if (std::abs(s) > cfg_.law_range) range_warned = true;
            if (range_warned)
                result.warnings.push_back(
                    "boundary trace left the certified law range; growth constants may not "
                    "cover the run");
        }

        buffer.push(std::move(next));
    }

    result.trajectory = buffer.take();
    return result;
}

void write_monitor_csv(const std::vector<MonitorRecord>& monitors, std::ostream& os) {
    os << "step,t,kinetic,thermal,visc_increment,therm_increment,reg_increment,"
          "bd_work_u,bd_work_th,picard_u,picard_th,slack_u,slack_th,"
          "div_residual,conv_residual_u,conv_residual_th,u_E_sq,th_V_sq,"
          "xi_l2_sq,xi1_l2_sq,xi_growth_max,xi1_growth_max,p_mean_abs\n";
    char buf[64];
    auto put = [&](double v, bool last = false) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << buf << (last ? "\n" : ",");
    };
    for (const auto& r : monitors) {
        os << r.step << ",";
        put(r.t);
        put(r.kinetic);
        put(r.thermal);
        put(r.visc_increment);
        put(r.therm_increment);
        put(r.reg_increment);
        put(r.bd_work_u);
        put(r.bd_work_th);
        os << r.picard_u << "," << r.picard_th << ",";
        put(r.slack_u);
        put(r.slack_th);
        put(r.div_residual);
        put(r.conv_residual_u);
        put(r.conv_residual_th);
        put(r.u_E_sq);
        put(r.th_V_sq);
        put(r.xi_l2_sq);
        put(r.xi1_l2_sq);
        put(r.xi_growth_max);
        put(r.xi1_growth_max);
        put(r.p_mean_abs, true);
    }
}

}  // namespace bouss
