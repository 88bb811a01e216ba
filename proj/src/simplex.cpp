#include "gsvc/simplex.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace gsvc {

namespace {

constexpr double kCostTol = 1e-9;    // reduced-cost optimality tolerance
constexpr double kPivotTol = 1e-11;  // smallest usable pivot magnitude
constexpr double kRatioTie = 1e-12;  // ratio-test tie window
constexpr int kMaxPivots = 50000;

enum class VarStatus { Basic, AtLower, AtUpper };

}  // namespace

ChebyshevSolution minimize_chebyshev(const Eigen::VectorXd& r,
                                     const Eigen::MatrixXd& W,
                                     const Eigen::VectorXd& lo,
                                     const Eigen::VectorXd& up) {
    const int p = static_cast<int>(r.size());
    const int q = static_cast<int>(W.cols());
    if (p < 1 || q < 1 || W.rows() != p)
        throw std::invalid_argument("residual and matrix dimensions do not conform");
    if (lo.size() != q || up.size() != q)
        throw std::invalid_argument("bound vectors must match the control count");
    if (!r.allFinite() || !W.allFinite() || !lo.allFinite() || !up.allFinite())
        throw std::invalid_argument("inputs must be finite");
    for (int j = 0; j < q; ++j) {
        if (lo[j] > up[j]) throw std::invalid_argument("lower bound exceeds upper bound");
    }

    const double inf = std::numeric_limits<double>::infinity();
    const int rows = 2 * p;          // both signs of the epigraph inequality
    const int nt = q + 1 + rows;     // controls, t, one slack per row

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, nt);
    A.block(0, 0, p, q) = W;
    A.block(p, 0, p, q) = -W;
    A.block(0, q, rows, 1).setConstant(-1.0);
    A.block(0, q + 1, rows, rows).setIdentity();
    Eigen::VectorXd b(rows);
    b.head(p) = r;
    b.tail(p) = -r;

    Eigen::VectorXd lb = Eigen::VectorXd::Zero(nt);
    Eigen::VectorXd ub = Eigen::VectorXd::Constant(nt, inf);
    lb.head(q) = lo;
    ub.head(q) = up;

    // Start at u = lo with t = max |r - W lo|: every slack is nonnegative and
    // the argmax row's slack sits at zero, so t replaces it in the basis.
    const Eigen::VectorXd d = r - W * lo;
    int imax = 0;
    d.cwiseAbs().maxCoeff(&imax);
    const int trow = d[imax] >= 0.0 ? p + imax : imax;

    std::vector<VarStatus> status(nt, VarStatus::AtLower);
    std::vector<int> basis(rows);
    for (int i = 0; i < rows; ++i) {
        basis[i] = q + 1 + i;
        status[q + 1 + i] = VarStatus::Basic;
    }
    status[q + 1 + trow] = VarStatus::AtLower;
    basis[trow] = q;
    status[q] = VarStatus::Basic;

    Eigen::MatrixXd B(rows, rows);
    for (int i = 0; i < rows; ++i) B.col(i) = A.col(basis[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    Eigen::MatrixXd T = lu.solve(A);       // B^-1 A, maintained by pivoting
    Eigen::VectorXd rhs = lu.solve(b);     // B^-1 b

    auto bound_value = [&](int j) {
        return status[j] == VarStatus::AtUpper ? ub[j] : lb[j];
    };
    auto basic_values = [&]() {
        Eigen::VectorXd xb = rhs;
        for (int j = 0; j < nt; ++j) {
            if (status[j] == VarStatus::Basic) continue;
            const double v = bound_value(j);
            if (v != 0.0) xb -= T.col(j) * v;
        }
        return xb;
    };

    ChebyshevSolution out;
    for (int iter = 0; iter < kMaxPivots; ++iter) {
        const Eigen::VectorXd xb = basic_values();

        Eigen::VectorXd cB = Eigen::VectorXd::Zero(rows);
        for (int i = 0; i < rows; ++i) {
            if (basis[i] == q) cB[i] = 1.0;
        }

        int enter = -1;
        double dir = 1.0;
        for (int j = 0; j < nt; ++j) {
            if (status[j] == VarStatus::Basic) continue;
            const double red = (j == q ? 1.0 : 0.0) - cB.dot(T.col(j));
            if (status[j] == VarStatus::AtLower && red < -kCostTol) {
                enter = j;
                dir = 1.0;
                break;  // Bland: first improving index
            }
            if (status[j] == VarStatus::AtUpper && red > kCostTol) {
                enter = j;
                dir = -1.0;
                break;
            }
        }
        if (enter < 0) break;  // optimal

        // Ratio test: the entering variable moves by delta in direction dir;
        // basic variable in row i changes at rate -dir * T(i, enter).
        double best = ub[enter] - lb[enter];  // bound-flip distance
        int leave_row = -1;                   // -1 means bound flip
        int block_var = enter;
        bool leave_upper = false;
        for (int i = 0; i < rows; ++i) {
            const double rate = -dir * T(i, enter);
            double lim;
            bool hits_upper;
            if (rate > kPivotTol) {
                if (std::isinf(ub[basis[i]])) continue;
                lim = (ub[basis[i]] - xb[i]) / rate;
                hits_upper = true;
            } else if (rate < -kPivotTol) {
                lim = (xb[i] - lb[basis[i]]) / (-rate);
                hits_upper = false;
            } else {
                continue;
            }
            if (lim < 0.0) lim = 0.0;  // degenerate basic value drift
            if (lim < best - kRatioTie ||
                (lim < best + kRatioTie && basis[i] < block_var)) {
                best = std::min(best, lim);
                leave_row = i;
                block_var = basis[i];
                leave_upper = hits_upper;
            }
        }

        if (std::isinf(best))
            throw std::runtime_error("epigraph LP is unbounded");

        if (leave_row < 0) {
            // Entering variable runs to its opposite bound; basis unchanged.
            status[enter] = status[enter] == VarStatus::AtLower
                                ? VarStatus::AtUpper
                                : VarStatus::AtLower;
            ++out.pivots;
            continue;
        }

        const double piv = T(leave_row, enter);
        if (std::abs(piv) < kPivotTol)
            throw std::runtime_error("simplex pivot vanished");
        T.row(leave_row) /= piv;
        rhs[leave_row] /= piv;
        for (int i = 0; i < rows; ++i) {
            if (i == leave_row) continue;
            const double f = T(i, enter);
            if (f != 0.0) {
                T.row(i) -= f * T.row(leave_row);
                rhs[i] -= f * rhs[leave_row];
            }
        }
        status[basis[leave_row]] =
            leave_upper ? VarStatus::AtUpper : VarStatus::AtLower;
        basis[leave_row] = enter;
        status[enter] = VarStatus::Basic;
        ++out.pivots;
        if (out.pivots >= kMaxPivots)
            throw std::runtime_error("simplex pivot limit exceeded");
    }

    const Eigen::VectorXd xb = basic_values();
    Eigen::VectorXd x(nt);
    for (int j = 0; j < nt; ++j) {
        if (status[j] != VarStatus::Basic) x[j] = bound_value(j);
    }
    for (int i = 0; i < rows; ++i) x[basis[i]] = xb[i];

    out.u = x.head(q).cwiseMax(lo).cwiseMin(up);
    out.objective = (r - W * out.u).cwiseAbs().maxCoeff();
    return out;
}

}  // namespace gsvc
