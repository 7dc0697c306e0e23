#pragma once

#include <string>
#include <vector>

#include "livseg/image.hpp"

namespace livseg {

enum class WaveletKind { Haar, Daubechies4 };

/// Orthonormal low-pass analysis filter taps.
const std::vector<double>& lowpass_filter(WaveletKind kind);
/// Quadrature mirror: g[k] = (-1)^k h[L-1-k].
std::vector<double> highpass_filter(WaveletKind kind);

/// Band naming: first letter is the filter applied along rows (horizontal),
/// second the filter along columns. LH therefore responds to vertical variation.
enum class Band { LH, HL, HH, LL };
std::string band_name(Band band);

struct DetailLevel {
    FloatImage lh;
    FloatImage hl;
    FloatImage hh;
    /// Dimensions of this level's input before odd-size edge replication.
    int input_width = 0;
    int input_height = 0;
};

struct SubbandPyramid {
    /// details[k] holds level k+1 (finest first).
    std::vector<DetailLevel> details;
    FloatImage approximation;
    int original_width = 0;
    int original_height = 0;

    int levels() const noexcept { return static_cast<int>(details.size()); }
};

/// Largest level count for which every level's input is at least 2x2.
int max_dwt_levels(int width, int height);

/// Separable filter-bank transform, rows then columns, recursing on LL.
/// Odd-sized inputs are edge-replicated to even before each level.
SubbandPyramid dwt2(const FloatImage& img, WaveletKind kind, int levels);

/// Inverse of dwt2, cropped back to the original dimensions.
FloatImage idwt2(const SubbandPyramid& pyr, WaveletKind kind);

struct SubbandFeature {
    int level = 0;
    Band band = Band::LL;
    double energy = 0.0;
    double norm_energy = 0.0;
    double log_energy = 0.0;
};

struct FeatureVector {
    std::vector<SubbandFeature> subbands;
    double mean = 0.0;
    double std_dev = 0.0;
    std::size_t area = 0;
};

/// Wavelet energy signature of the masked region's bounding box after mean
/// removal, plus intensity statistics of the region itself.
FeatureVector extract_features(const GrayImage8& img, const BinaryImage& region,
                               WaveletKind kind, int levels);

}  // namespace livseg
