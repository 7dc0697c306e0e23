#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace livseg {

/// Raised when an operation's documented precondition does not hold.
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Row-major 2-D raster. `Tag` distinguishes rasters that share a pixel type
/// (an 8-bit intensity image and a 0/1 mask are different things).
template <typename T, typename Tag = void>
class Raster {
public:
    using value_type = T;

    Raster() = default;

    Raster(int width, int height, T fill = T{})
        : width_(width), height_(height)
    {
        check_dims(width, height);
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    Raster(int width, int height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data))
    {
        check_dims(width, height);
        if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
            throw PreconditionError("raster data length " + std::to_string(data_.size()) +
                                    " does not match " + std::to_string(width) + "x" +
                                    std::to_string(height));
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
    const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }

    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    std::size_t index(int x, int y) const noexcept
    {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    bool contains(int x, int y) const noexcept
    {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    bool on_border(int x, int y) const noexcept
    {
        return x == 0 || y == 0 || x == width_ - 1 || y == height_ - 1;
    }

    std::span<T> pixels() noexcept { return data_; }
    std::span<const T> pixels() const noexcept { return data_; }

    const std::vector<T>& data() const noexcept { return data_; }

    template <typename U, typename OtherTag>
    bool same_shape(const Raster<U, OtherTag>& other) const noexcept
    {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    static void check_dims(int width, int height)
    {
        if (width <= 0 || height <= 0) {
            throw PreconditionError("raster dimensions must be positive, got " +
                                    std::to_string(width) + "x" + std::to_string(height));
        }
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

struct BinaryTag {};
struct LabelTag {};

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    friend bool operator==(const Rgb&, const Rgb&) = default;
};

using GrayImage8 = Raster<std::uint8_t>;
using FloatImage = Raster<double>;
/// 0 = background, 1 = foreground.
using BinaryImage = Raster<std::uint8_t, BinaryTag>;
/// 0 is reserved for watershed ridge (or unlabeled) pixels.
using LabelImage = Raster<std::int32_t, LabelTag>;
using RgbImage = Raster<Rgb>;

/// Largest label present; equals the region count for a contiguous labeling.
int num_labels(const LabelImage& labels);

/// True when labels are exactly {0?, 1, ..., num_labels(labels)}.
bool labels_contiguous(const LabelImage& labels);

FloatImage to_float(const GrayImage8& img);

/// Clamp to [0,255], then round half away from zero.
GrayImage8 to_u8(const FloatImage& img);

/// Affine min->0 / max->255 stretch; a constant image maps to all 0.
GrayImage8 rescale_to_u8(const FloatImage& img);

/// Foreground as 255, background as 0.
GrayImage8 mask_to_gray(const BinaryImage& mask);

/// Each channel replicates the intensity.
RgbImage gray_to_rgb(const GrayImage8& img);

BinaryImage complement(const BinaryImage& mask);
GrayImage8 complement(const GrayImage8& img);

std::size_t count_foreground(const BinaryImage& mask);

/// Mask of pixels carrying `label`.
BinaryImage label_mask(const LabelImage& labels, std::int32_t label);

std::uint8_t round_to_u8(double v) noexcept;

}  // namespace livseg
