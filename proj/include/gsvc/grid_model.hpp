#pragma once

#include <Eigen/Core>

#include <complex>
#include <cstdint>
#include <vector>

namespace gsvc {

enum class BusKind : std::uint8_t { Generator, Capacitor, Load };

struct BusId {
    int area = 0;
    BusKind kind = BusKind::Load;
    int index = 0;  // position within the (area, kind) partition
};

/// Multi-area network expressed through the partitioned susceptance blocks
/// of the linearized reactive power flow
///   [dQ_G; dQ_C; dQ_L] = B * [dV_G; dV_C; dV_L].
/// Blocks are global (all areas stacked); counts are per area.
struct NetworkModel {
    int areas = 1;
    int nG = 0, nC = 0, nL = 0;  // per-area counts

    Eigen::MatrixXd B_GG, B_GC, B_GL;
    Eigen::MatrixXd B_CG, B_CC, B_CL;
    Eigen::MatrixXd B_LG, B_LC, B_LL;

    std::complex<double> tie_line_impedance{0.02, 0.07};  // p.u.
    Eigen::VectorXd reference_voltages;                   // V_L*, per load bus

    int total_generators() const { return areas * nG; }
    int total_capacitors() const { return areas * nC; }
    int total_loads() const { return areas * nL; }

    /// Full symmetric susceptance matrix in [G | C | L] ordering.
    Eigen::MatrixXd assembled() const;

    /// Checks block conformance, symmetry, and invertibility of B_CC and of
    /// the load-side Schur complement. Throws std::invalid_argument naming
    /// the offending block.
    void validate() const;
};

/// Controller-side linearization: dV_L = J1 * dQ_L - J2 * u, with
/// u = [dV_G; dQ_C] stacked generator voltages then capacitor VARs.
struct SensitivityModel {
    Eigen::MatrixXd J1;            // nL x nL
    Eigen::MatrixXd J2;            // nL x (nG + nC)
    std::vector<int> pilot_rows;   // load buses equipped with PMUs
};

struct PlantState {
    Eigen::VectorXd V_L;  // load-bus voltage magnitudes, p.u.
    Eigen::VectorXd V_G;  // generator-bus voltages, p.u.
    Eigen::VectorXd Q_C;  // capacitor reactive outputs, p.u.
    Eigen::VectorXd Q_L;  // reactive load demands, p.u.
    double time = 0.0;    // seconds
};

struct ControlInput;  // svc_controller.hpp

/// Series susceptance -X/(R^2+X^2) of a line impedance R+jX.
double series_susceptance(std::complex<double> impedance);

/// Deterministic synthetic network: symmetric, diagonally dominant blocks
/// with seeded off-diagonal magnitudes; consecutive areas coupled through
/// the tie-line series susceptance.
NetworkModel build_synthetic_network(
    int areas, int nG, int nC, int nL, std::uint64_t seed,
    std::complex<double> tie_line_impedance = {0.02, 0.07});

/// J1 = (B_LL - B_LC B_CC^-1 B_CL)^-1 and the matching J2; throws when the
/// Schur complement is singular or the pilot set is empty/out of range.
SensitivityModel compute_sensitivities(const NetworkModel& net,
                                       std::vector<int> pilot_rows);

/// One linear plant step: V_L shifts by J1*dQ_L - J2*u with u clamped to its
/// bounds; V_G and Q_C shift by the clamped u components.
PlantState plant_response(const NetworkModel& net, const SensitivityModel& sens,
                          const PlantState& state, const Eigen::VectorXd& dQ_L,
                          const ControlInput& u);

/// Convenience overload computing the sensitivities on the fly.
PlantState plant_response(const NetworkModel& net, const PlantState& state,
                          const Eigen::VectorXd& dQ_L, const ControlInput& u);

/// Scales the reactive demand at the named load buses. Unknown bus indices
/// throw std::out_of_range.
PlantState apply_load_event(const PlantState& state,
                            const std::vector<int>& buses, double factor);

}  // namespace gsvc
