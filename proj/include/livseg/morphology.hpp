#pragma once

#include <utility>
#include <vector>

#include "livseg/image.hpp"

namespace livseg {

enum class Connectivity { Four, Eight };

struct Offset {
    int dx = 0;
    int dy = 0;
    friend bool operator==(const Offset&, const Offset&) = default;
};

/// Neighbor offsets of a pixel (origin excluded), in raster order.
const std::vector<Offset>& neighbors(Connectivity conn);

/// Flat structuring element. Must contain the origin and be symmetric under
/// negation, so erosion and dilation form an adjunction.
class StructuringElement {
public:
    explicit StructuringElement(std::vector<Offset> offsets);

    /// {(dx,dy) : dx^2 + dy^2 <= r^2}
    static StructuringElement disk(int radius);
    /// Origin plus the unit neighborhood of `conn`.
    static StructuringElement unit(Connectivity conn);

    const std::vector<Offset>& offsets() const noexcept { return offsets_; }

private:
    std::vector<Offset> offsets_;
};

/// Min filter; samples outside the frame read as 255.
GrayImage8 erode(const GrayImage8& img, const StructuringElement& se);
/// Max filter; samples outside the frame read as 0.
GrayImage8 dilate(const GrayImage8& img, const StructuringElement& se);

/// Binary counterparts with the same border policy (outside = foreground for
/// erosion, background for dilation).
BinaryImage erode(const BinaryImage& mask, const StructuringElement& se);
BinaryImage dilate(const BinaryImage& mask, const StructuringElement& se);

/// Fixpoint of marker <- min(dilate_unit(marker), mask). Requires marker <= mask.
GrayImage8 reconstruct_by_dilation(const GrayImage8& marker, const GrayImage8& mask,
                                   Connectivity conn);
/// Fixpoint of marker <- max(erode_unit(marker), mask). Requires marker >= mask.
GrayImage8 reconstruct_by_erosion(const GrayImage8& marker, const GrayImage8& mask,
                                  Connectivity conn);

GrayImage8 open_by_reconstruction(const GrayImage8& img, const StructuringElement& se,
                                  Connectivity conn);
GrayImage8 close_by_reconstruction(const GrayImage8& img, const StructuringElement& se,
                                   Connectivity conn);

/// Plateaus (equal-value components under `conn`) with no strictly higher neighbor.
BinaryImage regional_maxima(const GrayImage8& img, Connectivity conn);
BinaryImage regional_minima(const GrayImage8& img, Connectivity conn);
BinaryImage regional_minima(const FloatImage& img, Connectivity conn);

/// Rewrites `img` so its regional minima are exactly the components of `minima`.
GrayImage8 impose_minima(const GrayImage8& img, const BinaryImage& minima, Connectivity conn);

/// Exact Euclidean distance from each foreground pixel to the nearest
/// background pixel (0 on background). With no background at all every
/// value is width + height.
FloatImage distance_transform(const BinaryImage& bw);

/// Labels foreground components 1..n in raster order of their first pixel.
LabelImage label_components(const BinaryImage& mask, Connectivity conn);

/// Drops foreground components with fewer than `min_area` pixels.
BinaryImage remove_small_components(const BinaryImage& mask, std::size_t min_area,
                                    Connectivity conn);

}  // namespace livseg
