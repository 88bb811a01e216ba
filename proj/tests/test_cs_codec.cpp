#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gsvc/cs_codec.hpp"
#include "gsvc/rng.hpp"
#include "support.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

using gsvc::CodecConfig;

namespace {

CodecConfig make_cfg(std::size_t n, std::size_t m, std::uint64_t seed) {
    CodecConfig cfg;
    cfg.n = n;
    cfg.m = m;
    cfg.matrix_seed = seed;
    return cfg;
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, std::size_t n) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x(i) = gsvc::uniform_range(rng, -1.0, 1.0);
    }
    return x;
}

}  // namespace

TEST_CASE("config bounds") {
    CHECK_THROWS_AS(make_cfg(0, 0, 1).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_cfg(8, 0, 1).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_cfg(8, 9, 1).validate(), std::invalid_argument);
    CHECK_NOTHROW(make_cfg(8, 8, 1).validate());
    CHECK_NOTHROW(make_cfg(8, 1, 1).validate());
}

TEST_CASE("constant vectors transform to a pure DC coefficient") {
    const std::size_t n = 16;
    const double c = 2.5;
    const Eigen::VectorXd theta =
        gsvc::dct_forward(Eigen::VectorXd::Constant(n, c));
    CHECK(theta(0) ==
          doctest::Approx(c * std::sqrt(static_cast<double>(n))).epsilon(1e-12));
    for (Eigen::Index j = 1; j < theta.size(); ++j) {
        CHECK(std::abs(theta(j)) < 1e-12);
    }
}

TEST_CASE("transform round-trips and preserves the 2-norm") {
    std::mt19937_64 rng(3);
    for (std::size_t n : {1, 2, 7, 32}) {
        const Eigen::VectorXd x = random_vector(rng, n);
        const Eigen::VectorXd theta = gsvc::dct_forward(x);
        CHECK(theta.norm() == doctest::Approx(x.norm()).epsilon(1e-12));
        CHECK((gsvc::dct_inverse(theta) - x).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("basis matrix is orthonormal and matches the transforms") {
    const std::size_t n = 12;
    const Eigen::MatrixXd psi = gsvc::dct_basis(n);
    const Eigen::MatrixXd gram = psi.transpose() * psi;
    CHECK((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <
          1e-12);

    std::mt19937_64 rng(4);
    const Eigen::VectorXd theta = random_vector(rng, n);
    CHECK((gsvc::dct_inverse(theta) - psi * theta).lpNorm<Eigen::Infinity>() <
          1e-12);
    const Eigen::VectorXd x = random_vector(rng, n);
    CHECK((gsvc::dct_forward(x) - psi.transpose() * x)
              .lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("measurement matrix is seed-deterministic") {
    const auto cfg = make_cfg(32, 8, 42);
    const Eigen::MatrixXd a = gsvc::gen_measurement_matrix(cfg);
    const Eigen::MatrixXd b = gsvc::gen_measurement_matrix(cfg);
    CHECK(a == b);

    const Eigen::MatrixXd c = gsvc::gen_measurement_matrix(make_cfg(32, 8, 43));
    CHECK(a != c);
    CHECK(a.rows() == 8);
    CHECK(a.cols() == 32);
}

TEST_CASE("measurement matrix columns have near-unit energy at m = 64") {
    const auto cfg = make_cfg(128, 64, 7);
    const Eigen::MatrixXd phi = gsvc::gen_measurement_matrix(cfg);
    const double mean_sq = phi.colwise().squaredNorm().mean();
    CHECK(mean_sq > 0.8);
    CHECK(mean_sq < 1.2);
}

TEST_CASE("encode is the matrix product with the measurement matrix") {
    Eigen::MatrixXd phi(1, 2);
    phi << 1.0, 0.0;
    Eigen::VectorXd x(2);
    x << 3.0, 4.0;
    const auto frame = gsvc::encode_with_matrix(x, phi, make_cfg(2, 1, 0));
    REQUIRE(frame.y.size() == 1);
    CHECK(frame.y(0) == 3.0);

    const auto zero =
        gsvc::encode(Eigen::VectorXd::Zero(16), make_cfg(16, 4, 9));
    CHECK(zero.y.isZero(0.0));
}

TEST_CASE("encode is linear for a shared seed") {
    std::mt19937_64 rng(6);
    const auto cfg = make_cfg(24, 6, 77);
    const Eigen::VectorXd x1 = random_vector(rng, 24);
    const Eigen::VectorXd x2 = random_vector(rng, 24);
    const double a = 1.75;
    const double b = -0.5;
    const Eigen::VectorXd lhs = gsvc::encode(a * x1 + b * x2, cfg).y;
    const Eigen::VectorXd rhs =
        a * gsvc::encode(x1, cfg).y + b * gsvc::encode(x2, cfg).y;
    CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("zero measurements decode to zero coefficients") {
    gsvc::CompressedFrame frame;
    frame.config = make_cfg(16, 4, 1);
    frame.y = Eigen::VectorXd::Zero(4);
    const auto coeffs = gsvc::omp_decode(frame);
    CHECK(coeffs.support.empty());
    CHECK(coeffs.theta.isZero(0.0));
    CHECK(gsvc::recover(frame).isZero(0.0));
}

TEST_CASE("1-sparse coefficients are recovered exactly at n=32, m=8") {
    std::mt19937_64 rng(12);
    const Eigen::MatrixXd psi = gsvc::dct_basis(32);
    for (int trial = 0; trial < 20; ++trial) {
        const auto cfg = make_cfg(32, 8, 1000 + static_cast<std::uint64_t>(trial));
        const auto j = static_cast<Eigen::Index>(rng() % 32);
        const double coef =
            gsvc::uniform_range(rng, 0.5, 2.0) * ((rng() % 2) ? 1.0 : -1.0);
        Eigen::VectorXd theta = Eigen::VectorXd::Zero(32);
        theta(j) = coef;
        const Eigen::VectorXd x = psi * theta;

        const auto decoded = gsvc::omp_decode(gsvc::encode(x, cfg));
        REQUIRE(decoded.support.size() == 1);
        CHECK(decoded.support[0] == static_cast<std::size_t>(j));
        CHECK(std::abs(decoded.theta(j) - coef) < 1e-8);
    }
}

TEST_CASE("residual never loses to the exhaustive best-support search") {
    std::mt19937_64 rng(13);
    const std::size_t n = 10;
    const std::size_t m = 6;
    for (int trial = 0; trial < 40; ++trial) {
        const auto cfg = make_cfg(n, m, 500 + static_cast<std::uint64_t>(trial));
        const Eigen::MatrixXd sensing =
            gsvc::gen_measurement_matrix(cfg) * gsvc::dct_basis(n);

        const std::size_t k = 1 + (rng() % 2);
        Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
        std::vector<std::size_t> picked;
        while (picked.size() < k) {
            const std::size_t j = rng() % n;
            bool dup = false;
            for (std::size_t p : picked) dup = dup || (p == j);
            if (!dup) {
                picked.push_back(j);
                y += gsvc::uniform_range(rng, 0.5, 1.5) *
                     sensing.col(static_cast<Eigen::Index>(j));
            }
        }
        const double oracle = testsup::exhaustive_l0_residual(y, sensing, k);
        REQUIRE(oracle < 1e-9);  // constructed to be exactly k-sparse

        const auto decoded = gsvc::omp_decode(y, sensing, 1e-6, m);
        const double residual = (y - sensing * decoded.theta).norm();
        CHECK(residual <= oracle + 1e-6);
    }
}

TEST_CASE("constant signals survive compression at m = 4") {
    const auto cfg = make_cfg(16, 4, 21);
    const Eigen::VectorXd x = Eigen::VectorXd::Constant(16, 0.85);
    const Eigen::VectorXd xh = gsvc::recover(gsvc::encode(x, cfg));
    CHECK((xh - x).lpNorm<Eigen::Infinity>() < 1e-6);
}

TEST_CASE("square sensing recovers arbitrary signals") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 5; ++trial) {
        const auto cfg = make_cfg(20, 20, 300 + static_cast<std::uint64_t>(trial));
        const Eigen::VectorXd x = random_vector(rng, 20);
        const Eigen::VectorXd xh = gsvc::recover(gsvc::encode(x, cfg));
        CHECK(gsvc::snr_db(x, xh) >= 120.0);
    }
}

TEST_CASE("one missing measurement still recovers sparse signals") {
    std::mt19937_64 rng(15);
    const Eigen::MatrixXd psi = gsvc::dct_basis(20);
    for (int trial = 0; trial < 10; ++trial) {
        const auto cfg = make_cfg(20, 19, 400 + static_cast<std::uint64_t>(trial));
        Eigen::VectorXd theta = Eigen::VectorXd::Zero(20);
        theta(static_cast<Eigen::Index>(rng() % 20)) =
            gsvc::uniform_range(rng, 0.5, 2.0);
        const Eigen::VectorXd x = psi * theta;
        const Eigen::VectorXd xh = gsvc::recover(gsvc::encode(x, cfg));
        CHECK(gsvc::snr_db(x, xh) >= 120.0);
    }
}

TEST_CASE("correlated telemetry at half the measurements stays above 30 dB") {
    const std::size_t n = 54;
    for (std::uint64_t seed : {1, 2, 3}) {
        const Eigen::VectorXd x = testsup::correlated_telemetry(n, seed);
        const auto cfg = make_cfg(n, 27, gsvc::mix_seed(0xA1, seed));
        const Eigen::VectorXd xh = gsvc::recover(gsvc::encode(x, cfg));
        CHECK(gsvc::snr_db(x, xh) >= 30.0);
    }
}

TEST_CASE("residual norm never rises as the iteration budget grows") {
    std::mt19937_64 rng(16);
    const std::size_t n = 24;
    const std::size_t m = 12;
    const auto cfg = make_cfg(n, m, 88);
    const Eigen::MatrixXd sensing =
        gsvc::gen_measurement_matrix(cfg) * gsvc::dct_basis(n);
    const Eigen::VectorXd y = sensing * random_vector(rng, n);

    double prev = y.norm();
    for (std::size_t iters = 1; iters <= m; ++iters) {
        const auto decoded = gsvc::omp_decode(y, sensing, 1e-300, iters);
        const double residual = (y - sensing * decoded.theta).norm();
        CHECK(residual <= prev + 1e-12);
        prev = residual;
    }
}

TEST_CASE("decoding the same frame twice gives identical output") {
    std::mt19937_64 rng(17);
    const auto cfg = make_cfg(40, 10, 91);
    const auto frame = gsvc::encode(random_vector(rng, 40), cfg);
    const auto a = gsvc::omp_decode(frame);
    const auto b = gsvc::omp_decode(frame);
    CHECK(a.theta == b.theta);
    CHECK(a.support == b.support);
    for (Eigen::Index j = 0; j < a.theta.size(); ++j) {
        bool in_support = false;
        for (std::size_t s : a.support) {
            in_support = in_support || (s == static_cast<std::size_t>(j));
        }
        if (!in_support) CHECK(a.theta(j) == 0.0);
    }
}

TEST_CASE("compression ratio is n over m") {
    CHECK(gsvc::compression_ratio(54, 27) == 2.0);
    CHECK(gsvc::compression_ratio(54, 54) == 1.0);
    CHECK(gsvc::compression_ratio(486, 49) ==
          doctest::Approx(486.0 / 49.0).epsilon(1e-12));
    CHECK_THROWS_AS(gsvc::compression_ratio(54, 0), std::invalid_argument);
}

TEST_CASE("snr measures the relative recovery error in dB") {
    Eigen::VectorXd x(2);
    x << 3.0, 4.0;
    CHECK(std::isinf(gsvc::snr_db(x, x)));

    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
    CHECK(gsvc::snr_db(x, zero) == doctest::Approx(0.0).epsilon(1e-12));

    const Eigen::VectorXd near = x * 0.9;  // error norm = 0.1 * signal norm
    CHECK(gsvc::snr_db(x, near) == doctest::Approx(20.0).epsilon(1e-9));

    CHECK_THROWS_AS(gsvc::snr_db(zero, x), std::invalid_argument);
    Eigen::VectorXd three = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(gsvc::snr_db(x, three), std::invalid_argument);
}
