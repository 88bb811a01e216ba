#include "gsvc/cs_codec.hpp"

#include "gsvc/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace gsvc {

void CodecConfig::validate() const {
    if (m < 1 || m > n) {
        throw std::invalid_argument("codec requires 1 <= m <= n");
    }
    if (omp_residual_tol <= 0.0) {
        throw std::invalid_argument("omp_residual_tol must be positive");
    }
}

Eigen::VectorXd dct_forward(const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size();
    if (n < 1) {
        throw std::invalid_argument("empty signal");
    }
    const double scale0 = std::sqrt(1.0 / static_cast<double>(n));
    const double scale = std::sqrt(2.0 / static_cast<double>(n));
    Eigen::VectorXd theta(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            acc += x(j) * std::cos(std::numbers::pi * (j + 0.5) * k / n);
        }
        theta(k) = (k == 0 ? scale0 : scale) * acc;
    }
    return theta;
}

Eigen::VectorXd dct_inverse(const Eigen::VectorXd& theta) {
    const Eigen::Index n = theta.size();
    if (n < 1) {
        throw std::invalid_argument("empty coefficient vector");
    }
    const double scale0 = std::sqrt(1.0 / static_cast<double>(n));
    const double scale = std::sqrt(2.0 / static_cast<double>(n));
    Eigen::VectorXd x(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double acc = scale0 * theta(0);
        for (Eigen::Index k = 1; k < n; ++k) {
            acc += scale * theta(k) * std::cos(std::numbers::pi * (j + 0.5) * k / n);
        }
        x(j) = acc;
    }
    return x;
}

Eigen::MatrixXd dct_basis(std::size_t n) {
    if (n < 1) {
        throw std::invalid_argument("basis size must be >= 1");
    }
    const auto ni = static_cast<Eigen::Index>(n);
    const double scale0 = std::sqrt(1.0 / static_cast<double>(n));
    const double scale = std::sqrt(2.0 / static_cast<double>(n));
    Eigen::MatrixXd psi(ni, ni);
    for (Eigen::Index j = 0; j < ni; ++j) {
        for (Eigen::Index k = 0; k < ni; ++k) {
            psi(j, k) = (k == 0 ? scale0 : scale) *
                        std::cos(std::numbers::pi * (j + 0.5) * k / ni);
        }
    }
    return psi;
}

Eigen::MatrixXd gen_measurement_matrix(const CodecConfig& cfg) {
    cfg.validate();
    GaussianSource gauss(cfg.matrix_seed);
    const double sigma = 1.0 / std::sqrt(static_cast<double>(cfg.m));
    Eigen::MatrixXd phi(static_cast<Eigen::Index>(cfg.m),
                        static_cast<Eigen::Index>(cfg.n));
    for (Eigen::Index r = 0; r < phi.rows(); ++r) {
        for (Eigen::Index c = 0; c < phi.cols(); ++c) {
            phi(r, c) = sigma * gauss.next();
        }
    }
    return phi;
}

CompressedFrame encode_with_matrix(const Eigen::VectorXd& x,
                                   const Eigen::MatrixXd& phi,
                                   const CodecConfig& cfg, double timestamp,
                                   std::uint16_t area_id) {
    cfg.validate();
    if (x.size() != static_cast<Eigen::Index>(cfg.n) || phi.cols() != x.size() ||
        phi.rows() != static_cast<Eigen::Index>(cfg.m)) {
        throw std::invalid_argument("signal/matrix dimensions do not match config");
    }
    CompressedFrame frame;
    frame.y = phi * x;
    frame.config = cfg;
    frame.timestamp = timestamp;
    frame.area_id = area_id;
    return frame;
}

CompressedFrame encode(const Eigen::VectorXd& x, const CodecConfig& cfg,
                       double timestamp, std::uint16_t area_id) {
    return encode_with_matrix(x, gen_measurement_matrix(cfg), cfg, timestamp,
                              area_id);
}

SparseCoefficients omp_decode(const Eigen::VectorXd& y,
                              const Eigen::MatrixXd& sensing,
                              double residual_tol, std::size_t max_iters) {
    const Eigen::Index m = sensing.rows();
    const Eigen::Index n = sensing.cols();
    if (y.size() != m) {
        throw std::invalid_argument("measurement length does not match sensing matrix");
    }

    SparseCoefficients out;
    out.theta = Eigen::VectorXd::Zero(n);

    const Eigen::VectorXd col_norms =
        sensing.colwise().norm().transpose();

    std::vector<char> in_support(static_cast<std::size_t>(n), 0);
    Eigen::VectorXd residual = y;

    // Cholesky factor of the Gram matrix of the selected atoms, grown one
    // bordering row per iteration so each least-squares re-solve is O(k^2).
    Eigen::MatrixXd chol;          // lower triangular, k x k
    Eigen::MatrixXd atoms;         // m x k selected columns
    Eigen::VectorXd atom_rhs;      // atoms^T * y

    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        if (residual.norm() < residual_tol) {
            break;
        }

        // Most-correlated unused column, correlation normalized per atom.
        Eigen::Index best = -1;
        double best_score = 0.0;
        const Eigen::VectorXd corr = sensing.transpose() * residual;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (in_support[static_cast<std::size_t>(j)] || col_norms(j) <= 0.0) {
                continue;
            }
            const double score = std::abs(corr(j)) / col_norms(j);
            if (score > best_score) {
                best_score = score;
                best = j;
            }
        }
        if (best < 0 || best_score < 1e-14) {
            break;  // residual orthogonal to every remaining atom
        }

        const Eigen::Index k = static_cast<Eigen::Index>(out.support.size());
        const Eigen::VectorXd new_atom = sensing.col(best);

        // Border the Cholesky factor with the new atom.
        Eigen::VectorXd w(k);
        if (k > 0) {
            const Eigen::VectorXd cross = atoms.transpose() * new_atom;
            w = chol.topLeftCorner(k, k)
                    .triangularView<Eigen::Lower>()
                    .solve(cross);
        }
        const double diag_sq = new_atom.squaredNorm() - w.squaredNorm();
        if (diag_sq <= 1e-12) {
            // Numerically dependent on the current support; no progress
            // possible along this atom.
            in_support[static_cast<std::size_t>(best)] = 1;
            continue;
        }

        atoms.conservativeResize(m, k + 1);
        atoms.col(k) = new_atom;
        chol.conservativeResize(k + 1, k + 1);
        chol.row(k).head(k) = w.transpose();
        chol(k, k) = std::sqrt(diag_sq);
        atom_rhs.conservativeResize(k + 1);
        atom_rhs(k) = new_atom.dot(y);

        in_support[static_cast<std::size_t>(best)] = 1;
        out.support.push_back(static_cast<std::size_t>(best));

        // Least squares on the active support via the Gram Cholesky.
        const auto lower = chol.topLeftCorner(k + 1, k + 1);
        Eigen::VectorXd coeffs =
            lower.triangularView<Eigen::Lower>().solve(atom_rhs);
        lower.transpose().triangularView<Eigen::Upper>().solveInPlace(coeffs);

        residual = y - atoms * coeffs;

        out.theta.setZero();
        for (Eigen::Index i = 0; i <= k; ++i) {
            out.theta(static_cast<Eigen::Index>(out.support[static_cast<std::size_t>(i)])) =
                coeffs(i);
        }
    }
    return out;
}

SparseCoefficients omp_decode(const CompressedFrame& frame) {
    frame.config.validate();
    const Eigen::MatrixXd sensing =
        gen_measurement_matrix(frame.config) * dct_basis(frame.config.n);
    return omp_decode(frame.y, sensing, frame.config.omp_residual_tol,
                      frame.config.effective_max_iters());
}

Eigen::VectorXd recover(const CompressedFrame& frame) {
    return dct_inverse(omp_decode(frame).theta);
}

double compression_ratio(std::size_t n, std::size_t m) {
    if (m < 1) {
        throw std::invalid_argument("measurement count must be >= 1");
    }
    return static_cast<double>(n) / static_cast<double>(m);
}

double snr_db(const Eigen::VectorXd& x, const Eigen::VectorXd& x_hat) {
    if (x.size() != x_hat.size()) {
        throw std::invalid_argument("length mismatch");
    }
    const double ref = x.norm();
    if (ref == 0.0) {
        throw std::invalid_argument("SNR undefined for a zero signal");
    }
    const double err = (x - x_hat).norm();
    if (err == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return -20.0 * std::log10(err / ref);
}

}  // namespace gsvc
