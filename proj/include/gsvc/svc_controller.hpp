#pragma once

#include "gsvc/grid_model.hpp"
#include "gsvc/simplex.hpp"

#include <Eigen/Core>

namespace gsvc {

/// Control action u = [dV_G; dQ_C]: generator voltage set-point moves stacked
/// over capacitor VAR moves, with per-entry box bounds on the stacked vector.
struct ControlInput {
    Eigen::VectorXd dV_G;
    Eigen::VectorXd dQ_C;
    Eigen::VectorXd lower;  // stacked, length nG + nC
    Eigen::VectorXd upper;

    Eigen::Index generators() const { return dV_G.size(); }
    Eigen::Index capacitors() const { return dQ_C.size(); }
    Eigen::Index size() const { return dV_G.size() + dQ_C.size(); }

    Eigen::VectorXd stacked() const;
    /// Stacked vector clamped into [lower, upper].
    Eigen::VectorXd clamped() const;

    /// Throws unless lower <= upper elementwise and bound lengths match.
    void validate() const;

    static ControlInput zeros(Eigen::Index generators, Eigen::Index capacitors,
                              Eigen::VectorXd lower, Eigen::VectorXd upper);
    static ControlInput from_stacked(const Eigen::VectorXd& values,
                                     Eigen::Index generators,
                                     Eigen::VectorXd lower,
                                     Eigen::VectorXd upper);
};

struct ControllerConfig {
    double beta = 0.5;       // acceleration parameter of the pilot update
    double epsilon = 1e-3;   // convergence threshold on the pilot step, p.u.
    int max_iterations = 50;

    void validate() const;  // 0 < beta <= 1, epsilon > 0, max_iterations >= 1
};

struct ControlResult {
    ControlInput u_star;
    int iterations = 0;
    Eigen::VectorXd final_deviation;  // predicted dV_L at every load bus
    double x_rms = 0.0;               // RMS of final_deviation
    bool converged = false;
};

/// Minimum-norm load-change estimate from pilot deviations:
/// dQ_L* = J_p^T (J_p J_p^T)^-1 dV_p. Throws when J_p J_p^T is singular
/// (degenerate pilot placement).
Eigen::VectorXd estimate_load_change(const Eigen::MatrixXd& J_p,
                                     const Eigen::VectorXd& dV_p);

/// Rows of J1 at the model's pilot buses.
Eigen::MatrixXd pilot_sensitivity(const SensitivityModel& sens);

/// Box-constrained Chebyshev fit: u minimizing ||r - J2 u||_inf where r is
/// the load-driven deviation J1 dQ_L. Returned input carries bounds.values
/// split back into generator and capacitor parts.
ControlInput solve_inf_norm(const Eigen::VectorXd& r, const Eigen::MatrixXd& J2,
                            const ControlInput& bounds);

/// Iterates estimate / solve / predict with the damped pilot update
/// V_p <- V_p + beta * dV_pred until the pilot step drops below epsilon.
/// Non-convergence is reported in the flag, never thrown.
ControlResult run_control_loop(const SensitivityModel& sens,
                               const Eigen::VectorXd& V_p,
                               const Eigen::VectorXd& V_p_ref,
                               const ControlInput& bounds,
                               const ControllerConfig& cfg = {});

/// sqrt(mean squared deviation) between a voltage profile and its reference.
double rms_deviation(const Eigen::VectorXd& V_L, const Eigen::VectorXd& V_L_ref);

}  // namespace gsvc
