#include "gsvc/mse_detector.hpp"

#include "gsvc/morphology.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <stdexcept>

namespace gsvc {

ScaleMatrix build_scale_matrix(std::span<const double> window, std::size_t m2) {
    if (m2 < 1) {
        throw std::invalid_argument("scale count m2 must be >= 1");
    }
    const std::size_t w = window.size();
    const std::size_t largest_se = 2 * m2 - 1;
    if (w < largest_se) {
        throw std::invalid_argument("window shorter than the largest SE");
    }

    ScaleMatrix out;
    out.window_length = w;
    out.H.resize(static_cast<Eigen::Index>(m2), static_cast<Eigen::Index>(w));
    out.scales.reserve(m2);

    Signal x;
    x.samples.assign(window.begin(), window.end());
    for (std::size_t i = 0; i < m2; ++i) {
        const std::size_t se_len = 2 * i + 1;
        out.scales.push_back(se_len);
        const Signal row = mmf(x, StructuringElement::flat(se_len));
        for (std::size_t k = 0; k < w; ++k) {
            out.H(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                row.samples[k];
        }
    }
    return out;
}

Eigen::VectorXd svd_singular_values(const Eigen::MatrixXd& A) {
    if (!A.allFinite()) {
        throw std::invalid_argument("matrix has non-finite entries");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    return svd.singularValues();
}

EntropyReport entropy_from_singulars(const Eigen::VectorXd& sigma,
                                     double selection_tol, double threshold) {
    if (sigma.size() == 0 || sigma(0) <= 0.0) {
        throw std::invalid_argument("all singular values are zero");
    }
    for (Eigen::Index j = 1; j < sigma.size(); ++j) {
        if (sigma(j) > sigma(j - 1)) {
            throw std::invalid_argument("singular values must be descending");
        }
    }

    EntropyReport report;
    report.singular_values = sigma;
    report.threshold = threshold;

    Eigen::Index m3 = 0;
    while (m3 < sigma.size() && sigma(m3) / sigma(0) >= selection_tol) {
        ++m3;
    }
    report.selected_count = static_cast<std::size_t>(m3);

    const double total = sigma.head(m3).sum();
    report.probabilities = sigma.head(m3) / total;

    double entropy = 0.0;
    for (Eigen::Index j = 0; j < m3; ++j) {
        const double p = report.probabilities(j);
        entropy -= p * std::log(p);
    }
    report.entropy = std::max(entropy, 0.0);
    report.alarm = report.entropy > threshold;
    return report;
}

EntropyReport detect(std::span<const double> window, std::size_t m2,
                     double threshold) {
    const ScaleMatrix H = build_scale_matrix(window, m2);
    const Eigen::VectorXd sigma = svd_singular_values(H.H);
    return entropy_from_singulars(sigma, kDefaultSelectionTol, threshold);
}

}  // namespace gsvc
