#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <vector>

namespace gsvc {

inline constexpr std::size_t kDefaultScaleCount = 8;   // m2
inline constexpr std::size_t kDefaultWindowLength = 20;
inline constexpr double kDefaultSelectionTol = 1e-3;
inline constexpr double kDefaultEntropyThreshold = 0.05;  // nat

/// Stack of MMF outputs at growing structuring-element scales. Row 0 is the
/// raw window; row i is the window filtered with a flat SE of length 2i+1.
struct ScaleMatrix {
    Eigen::MatrixXd H;                 // m2 x w
    std::vector<std::size_t> scales;   // SE lengths per row: 1, 3, 5, ...
    std::size_t window_length = 0;
};

/// Outcome of the singular-entropy analysis of one window.
struct EntropyReport {
    Eigen::VectorXd singular_values;   // descending, non-negative
    std::size_t selected_count = 0;    // m3
    Eigen::VectorXd probabilities;     // length m3, sums to 1
    double entropy = 0.0;              // nats
    bool alarm = false;
    double threshold = kDefaultEntropyThreshold;
};

/// Filter the window at m2 scales. Throws if the window is shorter than the
/// largest SE (length 2*m2-1).
ScaleMatrix build_scale_matrix(std::span<const double> window, std::size_t m2);

/// Singular values of A, descending.
Eigen::VectorXd svd_singular_values(const Eigen::MatrixXd& A);

/// Keep the singular values with sigma_j/sigma_1 >= selection_tol, normalize
/// them to probabilities and take the Shannon entropy in nats.
EntropyReport entropy_from_singulars(const Eigen::VectorXd& sigma,
                                     double selection_tol = kDefaultSelectionTol,
                                     double threshold = kDefaultEntropyThreshold);

/// Full pipeline: scale matrix -> SVD -> entropy, with alarm = E > threshold.
EntropyReport detect(std::span<const double> window, std::size_t m2,
                     double threshold = kDefaultEntropyThreshold);

}  // namespace gsvc
