#include "gsvc/grid_model.hpp"

#include "gsvc/rng.hpp"
#include "gsvc/svc_controller.hpp"

#include <Eigen/Dense>

#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace gsvc {

Eigen::MatrixXd NetworkModel::assembled() const {
    const int tg = total_generators(), tc = total_capacitors(), tl = total_loads();
    Eigen::MatrixXd B(tg + tc + tl, tg + tc + tl);
    B.block(0, 0, tg, tg) = B_GG;
    B.block(0, tg, tg, tc) = B_GC;
    B.block(0, tg + tc, tg, tl) = B_GL;
    B.block(tg, 0, tc, tg) = B_CG;
    B.block(tg, tg, tc, tc) = B_CC;
    B.block(tg, tg + tc, tc, tl) = B_CL;
    B.block(tg + tc, 0, tl, tg) = B_LG;
    B.block(tg + tc, tg, tl, tc) = B_LC;
    B.block(tg + tc, tg + tc, tl, tl) = B_LL;
    return B;
}

namespace {

void require_shape(const Eigen::MatrixXd& m, int rows, int cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols) {
        std::ostringstream os;
        os << "block " << name << " is " << m.rows() << "x" << m.cols()
           << ", expected " << rows << "x" << cols;
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

void NetworkModel::validate() const {
    if (areas < 1 || nG < 1 || nC < 1 || nL < 1)
        throw std::invalid_argument("network needs at least one area and one bus of each kind");
    const int tg = total_generators(), tc = total_capacitors(), tl = total_loads();
    require_shape(B_GG, tg, tg, "B_GG");
    require_shape(B_GC, tg, tc, "B_GC");
    require_shape(B_GL, tg, tl, "B_GL");
    require_shape(B_CG, tc, tg, "B_CG");
    require_shape(B_CC, tc, tc, "B_CC");
    require_shape(B_CL, tc, tl, "B_CL");
    require_shape(B_LG, tl, tg, "B_LG");
    require_shape(B_LC, tl, tc, "B_LC");
    require_shape(B_LL, tl, tl, "B_LL");
    if (reference_voltages.size() != tl)
        throw std::invalid_argument("reference_voltages must have one entry per load bus");

    const Eigen::MatrixXd B = assembled();
    if (!B.isApprox(B.transpose(), 1e-9))
        throw std::invalid_argument("assembled susceptance matrix is not symmetric");

    Eigen::FullPivLU<Eigen::MatrixXd> lu_cc(B_CC);
    if (!lu_cc.isInvertible())
        throw std::invalid_argument("block B_CC is singular");
    const Eigen::MatrixXd schur = B_LL - B_LC * lu_cc.solve(B_CL);
    if (!Eigen::FullPivLU<Eigen::MatrixXd>(schur).isInvertible())
        throw std::invalid_argument("load-side Schur complement is singular");
}

double series_susceptance(std::complex<double> impedance) {
    const double r = impedance.real(), x = impedance.imag();
    const double mag2 = r * r + x * x;
    if (mag2 <= 0.0) throw std::invalid_argument("line impedance must be nonzero");
    return -x / mag2;
}

NetworkModel build_synthetic_network(int areas, int nG, int nC, int nL,
                                     std::uint64_t seed,
                                     std::complex<double> tie_line_impedance) {
    if (areas < 1 || nG < 1 || nC < 1 || nL < 1)
        throw std::invalid_argument("network needs at least one area and one bus of each kind");

    const int span = nG + nC + nL;           // buses per area
    const int total = areas * span;
    const int tg = areas * nG, tc = areas * nC;

    // Global index in [all G | all C | all L] ordering of local bus k of area a.
    auto gidx = [&](int a, int k) {
        if (k < nG) return a * nG + k;
        if (k < nG + nC) return tg + a * nC + (k - nG);
        return tg + tc + a * nL + (k - nG - nC);
    };

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(total, total);
    std::mt19937_64 rng(seed);

    // Fixed draw order (area by area, upper triangle, then diagonal margins)
    // keeps the model bitwise reproducible for a given seed.
    for (int a = 0; a < areas; ++a) {
        for (int i = 0; i < span; ++i) {
            for (int j = i + 1; j < span; ++j) {
                const double off = -uniform_range(rng, 0.3, 1.0);
                B(gidx(a, i), gidx(a, j)) = off;
                B(gidx(a, j), gidx(a, i)) = off;
            }
        }
        for (int i = 0; i < span; ++i) {
            const int gi = gidx(a, i);
            double strength = 0.0;
            for (int j = 0; j < span; ++j) {
                if (j != i) strength += std::abs(B(gi, gidx(a, j)));
            }
            // Strict diagonal dominance makes the assembled matrix SPD, which
            // guarantees B_CC and the load-side Schur complement invert.
            B(gi, gi) = strength + uniform_range(rng, 0.3, 0.9);
        }
    }

    // Consecutive areas are tied through their first generator buses.
    const double tie_b = series_susceptance(tie_line_impedance);
    for (int a = 0; a + 1 < areas; ++a) {
        const int gi = gidx(a, 0), gj = gidx(a + 1, 0);
        B(gi, gj) += tie_b;
        B(gj, gi) += tie_b;
        B(gi, gi) += std::abs(tie_b);
        B(gj, gj) += std::abs(tie_b);
    }

    NetworkModel net;
    net.areas = areas;
    net.nG = nG;
    net.nC = nC;
    net.nL = nL;
    net.tie_line_impedance = tie_line_impedance;
    const int tl = areas * nL;
    net.B_GG = B.block(0, 0, tg, tg);
    net.B_GC = B.block(0, tg, tg, tc);
    net.B_GL = B.block(0, tg + tc, tg, tl);
    net.B_CG = B.block(tg, 0, tc, tg);
    net.B_CC = B.block(tg, tg, tc, tc);
    net.B_CL = B.block(tg, tg + tc, tc, tl);
    net.B_LG = B.block(tg + tc, 0, tl, tg);
    net.B_LC = B.block(tg + tc, tg, tl, tc);
    net.B_LL = B.block(tg + tc, tg + tc, tl, tl);
    net.reference_voltages = Eigen::VectorXd::Ones(tl);
    net.validate();
    return net;
}

SensitivityModel compute_sensitivities(const NetworkModel& net,
                                       std::vector<int> pilot_rows) {
    const int tl = net.total_loads();
    if (pilot_rows.empty())
        throw std::invalid_argument("pilot set must not be empty");
    std::set<int> seen;
    for (int p : pilot_rows) {
        if (p < 0 || p >= tl) throw std::invalid_argument("pilot row out of range");
        if (!seen.insert(p).second) throw std::invalid_argument("duplicate pilot row");
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu_cc(net.B_CC);
    if (!lu_cc.isInvertible())
        throw std::invalid_argument("block B_CC is singular");

    const Eigen::MatrixXd schur = net.B_LL - net.B_LC * lu_cc.solve(net.B_CL);
    Eigen::FullPivLU<Eigen::MatrixXd> lu_s(schur);
    if (!lu_s.isInvertible())
        throw std::invalid_argument("load-side Schur complement is singular");

    SensitivityModel sens;
    sens.J1 = lu_s.inverse();
    const Eigen::MatrixXd left = net.B_LG - net.B_LC * lu_cc.solve(net.B_CG);
    const Eigen::MatrixXd right =
        net.B_LC * lu_cc.inverse();  // B_LC * B_CC^-1, capacitor columns
    Eigen::MatrixXd stacked(tl, left.cols() + right.cols());
    stacked << left, right;
    sens.J2 = sens.J1 * stacked;
    sens.pilot_rows = std::move(pilot_rows);
    return sens;
}

PlantState plant_response(const NetworkModel& net, const SensitivityModel& sens,
                          const PlantState& state, const Eigen::VectorXd& dQ_L,
                          const ControlInput& u) {
    const int tg = net.total_generators(), tc = net.total_capacitors();
    const int tl = net.total_loads();
    if (dQ_L.size() != tl)
        throw std::invalid_argument("dQ_L must have one entry per load bus");
    if (u.generators() != tg || u.capacitors() != tc)
        throw std::invalid_argument("control vector does not match network controls");
    if (state.V_L.size() != tl || state.V_G.size() != tg ||
        state.Q_C.size() != tc || state.Q_L.size() != tl)
        throw std::invalid_argument("plant state does not match network dimensions");

    const Eigen::VectorXd uc = u.clamped();
    PlantState next = state;
    next.V_L += sens.J1 * dQ_L - sens.J2 * uc;
    next.V_G += uc.head(tg);
    next.Q_C += uc.tail(tc);
    return next;
}

PlantState plant_response(const NetworkModel& net, const PlantState& state,
                          const Eigen::VectorXd& dQ_L, const ControlInput& u) {
    return plant_response(net, compute_sensitivities(net, {0}), state, dQ_L, u);
}

PlantState apply_load_event(const PlantState& state,
                            const std::vector<int>& buses, double factor) {
    PlantState next = state;
    for (int b : buses) {
        if (b < 0 || b >= next.Q_L.size())
            throw std::out_of_range("load event names an unknown load bus");
        next.Q_L[b] *= factor;
    }
    return next;
}

}  // namespace gsvc
