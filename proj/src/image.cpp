#include "livseg/image.hpp"

#include <algorithm>
#include <cmath>

namespace livseg {

std::uint8_t round_to_u8(double v) noexcept
{
    const double clamped = std::clamp(v, 0.0, 255.0);
    return static_cast<std::uint8_t>(std::round(clamped));
}

int num_labels(const LabelImage& labels)
{
    std::int32_t max_label = 0;
    for (const auto v : labels.pixels()) {
        max_label = std::max(max_label, v);
    }
    return max_label;
}

bool labels_contiguous(const LabelImage& labels)
{
    const int n = num_labels(labels);
    std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
    for (const auto v : labels.pixels()) {
        if (v < 0) {
            return false;
        }
        seen[static_cast<std::size_t>(v)] = true;
    }
    return std::all_of(seen.begin() + 1, seen.end(), [](bool s) { return s; });
}

FloatImage to_float(const GrayImage8& img)
{
    FloatImage out(img.width(), img.height());
    std::transform(img.pixels().begin(), img.pixels().end(), out.pixels().begin(),
                   [](std::uint8_t v) { return static_cast<double>(v); });
    return out;
}

GrayImage8 to_u8(const FloatImage& img)
{
    GrayImage8 out(img.width(), img.height());
    std::transform(img.pixels().begin(), img.pixels().end(), out.pixels().begin(), round_to_u8);
    return out;
}

GrayImage8 rescale_to_u8(const FloatImage& img)
{
    GrayImage8 out(img.width(), img.height(), 0);
    const auto [lo, hi] = std::minmax_element(img.pixels().begin(), img.pixels().end());
    const double min_v = *lo;
    const double range = *hi - min_v;
    if (!(range > 0.0)) {
        return out;
    }
    for (std::size_t i = 0; i < img.size(); ++i) {
        out[i] = round_to_u8((img[i] - min_v) * 255.0 / range);
    }
    return out;
}

GrayImage8 mask_to_gray(const BinaryImage& mask)
{
    GrayImage8 out(mask.width(), mask.height());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        out[i] = mask[i] ? 255 : 0;
    }
    return out;
}

RgbImage gray_to_rgb(const GrayImage8& img)
{
    RgbImage out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        out[i] = Rgb{img[i], img[i], img[i]};
    }
    return out;
}

BinaryImage complement(const BinaryImage& mask)
{
    BinaryImage out(mask.width(), mask.height());
    for (std::size_t i = 0; i < mask.size(); ++i) {
        out[i] = mask[i] ? 0 : 1;
    }
    return out;
}

GrayImage8 complement(const GrayImage8& img)
{
    GrayImage8 out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        out[i] = static_cast<std::uint8_t>(255 - img[i]);
    }
    return out;
}

std::size_t count_foreground(const BinaryImage& mask)
{
    return static_cast<std::size_t>(
        std::count_if(mask.pixels().begin(), mask.pixels().end(), [](auto v) { return v != 0; }));
}

BinaryImage label_mask(const LabelImage& labels, std::int32_t label)
{
    BinaryImage out(labels.width(), labels.height());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out[i] = labels[i] == label ? 1 : 0;
    }
    return out;
}

}  // namespace livseg
