#pragma once

#include <array>
#include <cstdint>

#include "livseg/image.hpp"

namespace livseg {

struct Histogram {
    std::array<std::uint64_t, 256> counts{};
    std::uint64_t total = 0;
};

struct OtsuResult {
    int threshold = 0;
    double between_class_variance = 0.0;
    /// All mass in a single bin: every split scores zero.
    bool degenerate = false;
};

/// Relative slack under which two between-class variances count as tied.
inline constexpr double kOtsuTieTolerance = 1e-12;

Histogram histogram(const GrayImage8& img);

/// Between-class variance maximization over splits t in [0,254]
/// (class 0 = intensities <= t). Ties resolve to floor(mean of argmax set).
/// Throws PreconditionError on an empty histogram.
OtsuResult otsu_threshold(const Histogram& hist);

/// Foreground where intensity > t.
BinaryImage binarize(const GrayImage8& img, int t);

}  // namespace livseg
