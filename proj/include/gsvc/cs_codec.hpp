#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <vector>

namespace gsvc {

enum class TransformBasis : std::uint8_t { Dct = 0 };

/// Parameters shared by the encoder and the decoder. Frames carry the seed,
/// not the measurement matrix; both ends regenerate the matrix from it.
struct CodecConfig {
    std::size_t n = 0;  // signal length
    std::size_t m = 0;  // measurement count, 1 <= m <= n
    TransformBasis basis = TransformBasis::Dct;
    std::uint64_t matrix_seed = 0;
    std::size_t omp_max_iters = 0;  // 0 means "use m"
    double omp_residual_tol = 1e-6;

    void validate() const;
    std::size_t effective_max_iters() const {
        return omp_max_iters == 0 ? m : omp_max_iters;
    }
};

struct CompressedFrame {
    Eigen::VectorXd y;  // m measurements
    CodecConfig config;
    double timestamp = 0.0;  // seconds
    std::uint16_t area_id = 0;
};

struct SparseCoefficients {
    Eigen::VectorXd theta;             // n transform coefficients
    std::vector<std::size_t> support;  // indices of the nonzeros
};

/// Orthonormal DCT-II analysis / synthesis pair; inverse(forward(x)) == x.
Eigen::VectorXd dct_forward(const Eigen::VectorXd& x);
Eigen::VectorXd dct_inverse(const Eigen::VectorXd& theta);

/// Synthesis matrix Psi with x = Psi * theta; columns are the DCT atoms.
Eigen::MatrixXd dct_basis(std::size_t n);

/// Seeded i.i.d. Gaussian measurement matrix, entries ~ N(0, 1/m).
Eigen::MatrixXd gen_measurement_matrix(const CodecConfig& cfg);

CompressedFrame encode(const Eigen::VectorXd& x, const CodecConfig& cfg,
                       double timestamp = 0.0, std::uint16_t area_id = 0);

/// Encode against an explicit measurement matrix (test hook; `encode`
/// forwards here with the seeded matrix).
CompressedFrame encode_with_matrix(const Eigen::VectorXd& x,
                                   const Eigen::MatrixXd& phi,
                                   const CodecConfig& cfg,
                                   double timestamp = 0.0,
                                   std::uint16_t area_id = 0);

/// Greedy orthogonal matching pursuit against the sensing matrix
/// Y = Phi * Psi rebuilt from the frame's seed.
SparseCoefficients omp_decode(const CompressedFrame& frame);

/// OMP against an explicit sensing matrix.
SparseCoefficients omp_decode(const Eigen::VectorXd& y,
                              const Eigen::MatrixXd& sensing,
                              double residual_tol, std::size_t max_iters);

/// omp_decode composed with the synthesis transform.
Eigen::VectorXd recover(const CompressedFrame& frame);

double compression_ratio(std::size_t n, std::size_t m);

/// -20*log10(||x - x_hat|| / ||x||) in dB; +infinity on exact recovery,
/// throws when ||x|| == 0.
double snr_db(const Eigen::VectorXd& x, const Eigen::VectorXd& x_hat);

}  // namespace gsvc
