#include "gsvc/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gsvc {

StructuringElement::StructuringElement(std::vector<double> heights)
    : heights_(std::move(heights)) {
    if (heights_.empty()) {
        throw std::invalid_argument("structuring element must be non-empty");
    }
    if (heights_.size() % 2 == 0) {
        throw std::invalid_argument(
            "structuring element length must be odd (no canonical center)");
    }
}

StructuringElement StructuringElement::flat(std::size_t length) {
    return StructuringElement(std::vector<double>(length, 0.0));
}

bool StructuringElement::is_flat() const {
    return std::all_of(heights_.begin(), heights_.end(),
                       [](double h) { return h == 0.0; });
}

namespace {

// Replicate-boundary sample access.
double at(const std::vector<double>& v, std::ptrdiff_t k) {
    const auto n = static_cast<std::ptrdiff_t>(v.size());
    k = std::clamp<std::ptrdiff_t>(k, 0, n - 1);
    return v[static_cast<std::size_t>(k)];
}

void check_signal(const Signal& x) {
    if (x.samples.empty()) {
        throw std::invalid_argument("signal must be non-empty");
    }
}

}  // namespace

Signal dilate(const Signal& x, const StructuringElement& g) {
    check_signal(x);
    const auto n = static_cast<std::ptrdiff_t>(x.samples.size());
    const std::ptrdiff_t h = g.half();
    Signal out;
    out.boundary = x.boundary;
    out.samples.resize(x.samples.size());
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        double m = -std::numeric_limits<double>::infinity();
        for (std::ptrdiff_t s = -h; s <= h; ++s) {
            m = std::max(m, at(x.samples, k + s) +
                                g.height(static_cast<std::size_t>(s + h)));
        }
        out.samples[static_cast<std::size_t>(k)] = m;
    }
    return out;
}

Signal erode(const Signal& x, const StructuringElement& g) {
    check_signal(x);
    const auto n = static_cast<std::ptrdiff_t>(x.samples.size());
    const std::ptrdiff_t h = g.half();
    Signal out;
    out.boundary = x.boundary;
    out.samples.resize(x.samples.size());
    for (std::ptrdiff_t k = 0; k < n; ++k) {
        double m = std::numeric_limits<double>::infinity();
        for (std::ptrdiff_t s = -h; s <= h; ++s) {
            m = std::min(m, at(x.samples, k + s) -
                                g.height(static_cast<std::size_t>(s + h)));
        }
        out.samples[static_cast<std::size_t>(k)] = m;
    }
    return out;
}

Signal mmf(const Signal& x, const StructuringElement& g) {
    Signal up = dilate(x, g);
    const Signal down = erode(x, g);
    for (std::size_t k = 0; k < up.samples.size(); ++k) {
        up.samples[k] = 0.5 * (up.samples[k] + down.samples[k]);
    }
    return up;
}

}  // namespace gsvc
