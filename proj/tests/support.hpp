#pragma once

// Test-side oracles and signal generators. Everything here is written
// independently of the library internals (naive algorithms, direct linear
// solves) so that agreement is evidence, not tautology.

#include "gsvc/grid_model.hpp"
#include "gsvc/rng.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace testsup {

// Sliding extremum with replicate edges; deliberately index-by-index naive.
inline std::vector<double> naive_extremum(const std::vector<double>& x,
                                          const std::vector<double>& g,
                                          bool max_op) {
    const auto n = static_cast<std::ptrdiff_t>(x.size());
    const auto h = static_cast<std::ptrdiff_t>(g.size() / 2);
    std::vector<double> out(x.size());
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        double best = 0.0;
        bool first = true;
        for (std::ptrdiff_t s = -h; s <= h; ++s) {
            std::ptrdiff_t idx = k + s;
            if (idx < 0) idx = 0;
            if (idx >= n) idx = n - 1;
            const double gk = g[static_cast<std::size_t>(s + h)];
            const double v = max_op ? x[static_cast<std::size_t>(idx)] + gk
                                    : x[static_cast<std::size_t>(idx)] - gk;
            if (first || (max_op ? v > best : v < best)) {
                best = v;
                first = false;
            }
        }
        out[static_cast<std::size_t>(k)] = best;
    }
    return out;
}

// Best residual over every support of size <= k, by exhaustive enumeration
// and dense least squares. Tractable for n <= 12, k <= 2.
inline double exhaustive_l0_residual(const Eigen::VectorXd& y,
                                     const Eigen::MatrixXd& sensing,
                                     std::size_t k) {
    const auto n = static_cast<std::size_t>(sensing.cols());
    double best = y.norm();

    auto fit = [&](const std::vector<std::size_t>& support) {
        Eigen::MatrixXd sub(sensing.rows(),
                            static_cast<Eigen::Index>(support.size()));
        for (std::size_t c = 0; c < support.size(); ++c) {
            sub.col(static_cast<Eigen::Index>(c)) =
                sensing.col(static_cast<Eigen::Index>(support[c]));
        }
        const Eigen::VectorXd coef = sub.colPivHouseholderQr().solve(y);
        const double r = (y - sub * coef).norm();
        if (r < best) best = r;
    };

    if (k >= 1) {
        for (std::size_t i = 0; i < n; ++i) fit({i});
    }
    if (k >= 2) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) fit({i, j});
        }
    }
    return best;
}

// Chebyshev objective minimized by stepping both controls over the box on a
// fixed grid. Grid minimum upper-bounds the true minimum.
inline double grid_search_chebyshev(const Eigen::VectorXd& r,
                                    const Eigen::MatrixXd& W,
                                    const Eigen::VectorXd& lo,
                                    const Eigen::VectorXd& up, double step) {
    const auto steps = [&](int j) {
        return static_cast<long>(std::floor((up(j) - lo(j)) / step + 1e-9));
    };
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd u(2);
    const long s0 = steps(0);
    const long s1 = steps(1);
    for (long i = 0; i <= s0; ++i) {
        u(0) = std::min(lo(0) + static_cast<double>(i) * step, up(0));
        for (long j = 0; j <= s1; ++j) {
            u(1) = std::min(lo(1) + static_cast<double>(j) * step, up(1));
            const double obj = (r - W * u).cwiseAbs().maxCoeff();
            if (obj < best) best = obj;
        }
    }
    return best;
}

// Load-voltage response solved from the full susceptance system instead of
// the reduced sensitivities: unknowns are dV_C and dV_L given dV_G, dQ_C,
// dQ_L. Independent of compute_sensitivities.
inline Eigen::VectorXd full_system_load_response(const gsvc::NetworkModel& net,
                                                 const Eigen::VectorXd& dV_G,
                                                 const Eigen::VectorXd& dQ_C,
                                                 const Eigen::VectorXd& dQ_L) {
    const auto nc = static_cast<Eigen::Index>(net.total_capacitors());
    const auto nl = static_cast<Eigen::Index>(net.total_loads());
    Eigen::MatrixXd A(nc + nl, nc + nl);
    A.topLeftCorner(nc, nc) = net.B_CC;
    A.topRightCorner(nc, nl) = net.B_CL;
    A.bottomLeftCorner(nl, nc) = net.B_LC;
    A.bottomRightCorner(nl, nl) = net.B_LL;
    Eigen::VectorXd b(nc + nl);
    b.head(nc) = dQ_C - net.B_CG * dV_G;
    b.tail(nl) = dQ_L - net.B_LG * dV_G;
    const Eigen::VectorXd sol = A.fullPivLu().solve(b);
    return sol.tail(nl);
}

// Synthetic PMU snapshot across n states: a 1 p.u. operating point carrying
// an inter-area swing, a local mode, a slow ramp and a small sensor noise
// floor. Smooth across the state index, hence compressible in the DCT.
inline Eigen::VectorXd correlated_telemetry(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(gsvc::mix_seed(seed, 0x7E1E));
    gsvc::GaussianSource noise(gsvc::mix_seed(seed, 0x5E05));
    const double two_pi = 6.283185307179586;
    const double f1 = gsvc::uniform_range(rng, 0.8, 1.6);
    const double f2 = gsvc::uniform_range(rng, 2.5, 4.5);
    const double f3 = gsvc::uniform_range(rng, 6.0, 9.0);
    const double ph1 = gsvc::uniform_range(rng, 0.0, two_pi);
    const double ph2 = gsvc::uniform_range(rng, 0.0, two_pi);
    const double ph3 = gsvc::uniform_range(rng, 0.0, two_pi);
    const double a1 = gsvc::uniform_range(rng, 0.04, 0.09);
    const double a2 = gsvc::uniform_range(rng, 0.015, 0.045);
    const double a3 = gsvc::uniform_range(rng, 0.005, 0.015);
    const double slope = gsvc::uniform_range(rng, -0.03, 0.03);
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double u =
            static_cast<double>(i) / static_cast<double>(n - 1);
        x(static_cast<Eigen::Index>(i)) = 1.0 +
                                          a1 * std::sin(two_pi * f1 * u + ph1) +
                                          a2 * std::sin(two_pi * f2 * u + ph2) +
                                          a3 * std::sin(two_pi * f3 * u + ph3) +
                                          slope * u + 2e-4 * noise.next();
    }
    return x;
}

}  // namespace testsup
