#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "livseg/image.hpp"
#include "livseg/morphology.hpp"

namespace livseg {

enum class ThresholdSource { OpeningClosing };
enum class TumorPolicy { LargestInterior, MaxMeanContrast };

struct PipelineConfig {
    int se_radius = 5;
    Connectivity connectivity = Connectivity::Eight;
    int min_marker_area = 20;
    int fg_shrink_radius = 1;
    ThresholdSource use_otsu_on = ThresholdSource::OpeningClosing;
    TumorPolicy tumor_policy = TumorPolicy::MaxMeanContrast;

    /// Throws PreconditionError when a field is out of range.
    void validate() const;
};

/// Stage dumps in pipeline order; 11 and 12 are color renderings.
inline constexpr std::array<std::string_view, 12> kStageNames{
    "01_input",          "02_otsu_binary",   "03_gradient",        "04_open_recon",
    "05_openclose_recon", "06_regional_maxima", "07_fg_markers",   "08_threshold_oc",
    "09_bg_ridge",       "10_imposed_minima", "11_label_matrix",   "12_overlay"};

struct Stage {
    std::string name;
    std::variant<GrayImage8, RgbImage> image;
};

struct SegmentationResult {
    LabelImage labels;
    BinaryImage ridge;
    BinaryImage fg_markers;
    BinaryImage bg_markers;
    std::vector<Stage> stages;
    std::optional<int> tumor_label;
    /// Otsu found a single-valued opening-closing; labels is one region.
    bool degenerate = false;
};

/// Raised by `segment` when marker cleanup leaves no foreground markers.
class NoForegroundMarkersError : public std::runtime_error {
public:
    NoForegroundMarkersError();
};

/// Priority flood from the nonzero marker pixels, ordered by (relief, FIFO
/// insertion). A pixel whose already-labeled neighbors disagree becomes
/// ridge (label 0). Marker pixels are never relabeled.
LabelImage watershed_seeded(const FloatImage& relief, const LabelImage& markers,
                            Connectivity conn);

/// Floods from the connected components of the regional minima of `relief`.
LabelImage watershed_unseeded(const FloatImage& relief, Connectivity conn);

/// Marker-controlled watershed: gradient relief, opening-closing by
/// reconstruction, foreground maxima markers, background ridge markers,
/// minima imposition, seeded flood and tumor selection.
SegmentationResult segment(const GrayImage8& img, const PipelineConfig& cfg);

struct RegionStats {
    std::size_t area = 0;
    double mean = 0.0;
    bool touches_border = false;
    double centroid_x = 0.0;
    double centroid_y = 0.0;
};

/// Entry k-1 describes label k; ridge pixels belong to no region.
std::vector<RegionStats> region_stats(const GrayImage8& img, const LabelImage& labels);

/// Picks the tumor among regions that do not touch the frame.
std::optional<int> select_tumor(const std::vector<RegionStats>& stats, TumorPolicy policy);

/// Golden-ratio hue per label, s = 0.85, v = 1; label 0 is black.
Rgb label_color(std::int32_t label);
RgbImage render_label_colormap(const LabelImage& labels);

/// Blends `color` over the grayscale image on mask pixels.
RgbImage render_overlay(const GrayImage8& img, const BinaryImage& mask, Rgb color, double alpha);

}  // namespace livseg
