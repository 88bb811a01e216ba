#include "gsvc/svc_controller.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>

namespace gsvc {

Eigen::VectorXd ControlInput::stacked() const {
    Eigen::VectorXd v(size());
    v << dV_G, dQ_C;
    return v;
}

Eigen::VectorXd ControlInput::clamped() const {
    if (lower.size() != size() || upper.size() != size())
        throw std::invalid_argument("bound lengths do not match the control vector");
    return stacked().cwiseMax(lower).cwiseMin(upper);
}

void ControlInput::validate() const {
    if (lower.size() != size() || upper.size() != size())
        throw std::invalid_argument("bound lengths do not match the control vector");
    for (Eigen::Index i = 0; i < lower.size(); ++i) {
        if (lower[i] > upper[i])
            throw std::invalid_argument("lower bound exceeds upper bound");
    }
}

ControlInput ControlInput::zeros(Eigen::Index generators, Eigen::Index capacitors,
                                 Eigen::VectorXd lower, Eigen::VectorXd upper) {
    ControlInput u;
    u.dV_G = Eigen::VectorXd::Zero(generators);
    u.dQ_C = Eigen::VectorXd::Zero(capacitors);
    u.lower = std::move(lower);
    u.upper = std::move(upper);
    u.validate();
    return u;
}

ControlInput ControlInput::from_stacked(const Eigen::VectorXd& values,
                                        Eigen::Index generators,
                                        Eigen::VectorXd lower,
                                        Eigen::VectorXd upper) {
    if (generators < 0 || generators > values.size())
        throw std::invalid_argument("generator count out of range");
    ControlInput u;
    u.dV_G = values.head(generators);
    u.dQ_C = values.tail(values.size() - generators);
    u.lower = std::move(lower);
    u.upper = std::move(upper);
    u.validate();
    return u;
}

void ControllerConfig::validate() const {
    if (!(beta > 0.0 && beta <= 1.0))
        throw std::invalid_argument("beta must lie in (0, 1]");
    if (!(epsilon > 0.0))
        throw std::invalid_argument("epsilon must be positive");
    if (max_iterations < 1)
        throw std::invalid_argument("max_iterations must be at least 1");
}

Eigen::VectorXd estimate_load_change(const Eigen::MatrixXd& J_p,
                                     const Eigen::VectorXd& dV_p) {
    if (J_p.rows() != dV_p.size())
        throw std::invalid_argument("pilot matrix and deviation lengths differ");
    if (J_p.rows() < 1 || J_p.rows() > J_p.cols())
        throw std::invalid_argument("pilot count must be between 1 and the load count");
    const Eigen::MatrixXd gram = J_p * J_p.transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (!lu.isInvertible())
        throw std::invalid_argument("pilot sensitivity rows are rank deficient");
    return J_p.transpose() * lu.solve(dV_p);
}

Eigen::MatrixXd pilot_sensitivity(const SensitivityModel& sens) {
    Eigen::MatrixXd J_p(static_cast<Eigen::Index>(sens.pilot_rows.size()),
                        sens.J1.cols());
    for (Eigen::Index i = 0; i < J_p.rows(); ++i)
        J_p.row(i) = sens.J1.row(sens.pilot_rows[static_cast<std::size_t>(i)]);
    return J_p;
}

ControlInput solve_inf_norm(const Eigen::VectorXd& r, const Eigen::MatrixXd& J2,
                            const ControlInput& bounds) {
    bounds.validate();
    if (J2.cols() != bounds.size())
        throw std::invalid_argument("control bounds do not match J2 columns");
    const ChebyshevSolution sol =
        minimize_chebyshev(r, J2, bounds.lower, bounds.upper);
    return ControlInput::from_stacked(sol.u, bounds.generators(), bounds.lower,
                                      bounds.upper);
}

ControlResult run_control_loop(const SensitivityModel& sens,
                               const Eigen::VectorXd& V_p,
                               const Eigen::VectorXd& V_p_ref,
                               const ControlInput& bounds,
                               const ControllerConfig& cfg) {
    cfg.validate();
    bounds.validate();
    const auto pilots = static_cast<Eigen::Index>(sens.pilot_rows.size());
    if (V_p.size() != pilots || V_p_ref.size() != pilots)
        throw std::invalid_argument("pilot vectors do not match the pilot set");
    if (sens.J2.cols() != bounds.size())
        throw std::invalid_argument("control bounds do not match J2 columns");

    const Eigen::MatrixXd J_p = pilot_sensitivity(sens);
    const Eigen::Index nl = sens.J1.rows();

    ControlResult res;
    res.u_star = ControlInput::zeros(bounds.generators(), bounds.capacitors(),
                                     bounds.lower, bounds.upper);
    res.final_deviation = Eigen::VectorXd::Zero(nl);

    Eigen::VectorXd vp = V_p;
    for (int k = 1; k <= cfg.max_iterations; ++k) {
        const Eigen::VectorXd dvp = vp - V_p_ref;
        const Eigen::VectorXd dq = estimate_load_change(J_p, dvp);
        const Eigen::VectorXd r = sens.J1 * dq;
        // Within tolerance: stop without new actuation. The LP objective is
        // flat here and a vertex answer could slew actuators for nothing.
        if (dvp.lpNorm<Eigen::Infinity>() < cfg.epsilon) {
            res.final_deviation = r;
            res.iterations = k;
            res.converged = true;
            break;
        }
        const ControlInput u = solve_inf_norm(r, sens.J2, bounds);
        const Eigen::VectorXd predicted = r - sens.J2 * u.clamped();

        Eigen::VectorXd vp_next = vp;
        for (Eigen::Index i = 0; i < pilots; ++i)
            vp_next[i] += cfg.beta * predicted[sens.pilot_rows[static_cast<std::size_t>(i)]];
        const double step = (vp_next - vp).lpNorm<Eigen::Infinity>();

        res.u_star = u;
        res.final_deviation = predicted;
        res.iterations = k;
        vp = vp_next;
        if (step < cfg.epsilon) {
            res.converged = true;
            break;
        }
    }
    res.x_rms = rms_deviation(res.final_deviation,
                              Eigen::VectorXd::Zero(res.final_deviation.size()));
    return res;
}

double rms_deviation(const Eigen::VectorXd& V_L, const Eigen::VectorXd& V_L_ref) {
    if (V_L.size() != V_L_ref.size())
        throw std::invalid_argument("voltage vectors must have equal length");
    if (V_L.size() < 1)
        throw std::invalid_argument("voltage vectors must be nonempty");
    return std::sqrt((V_L - V_L_ref).squaredNorm() /
                     static_cast<double>(V_L.size()));
}

}  // namespace gsvc
