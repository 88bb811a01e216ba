#pragma once

#include <cstddef>
#include <vector>

namespace gsvc {

/// How samples outside the signal are read when the structuring element
/// overhangs an edge. Replicate repeats the edge sample.
enum class BoundaryPolicy { Replicate };

/// Probe function for the morphological operators. A flat SE has zero
/// height at every offset; length must be odd so the origin sits at the
/// center sample.
class StructuringElement {
public:
    explicit StructuringElement(std::vector<double> heights);

    /// Flat SE of the given odd length.
    static StructuringElement flat(std::size_t length);

    std::size_t length() const { return heights_.size(); }
    /// Offsets covered are [-half, +half].
    std::ptrdiff_t half() const {
        return static_cast<std::ptrdiff_t>(heights_.size() / 2);
    }
    double height(std::size_t i) const { return heights_[i]; }
    bool is_flat() const;

private:
    std::vector<double> heights_;
};

struct Signal {
    std::vector<double> samples;
    BoundaryPolicy boundary = BoundaryPolicy::Replicate;
};

/// Sliding maximum of x(k+s)+g(s) over the SE window.
Signal dilate(const Signal& x, const StructuringElement& g);

/// Sliding minimum of x(k+s)-g(s) over the SE window.
Signal erode(const Signal& x, const StructuringElement& g);

/// Morphological median-type filter: elementwise average of the dilated
/// and eroded waveforms.
Signal mmf(const Signal& x, const StructuringElement& g);

}  // namespace gsvc
