#pragma once

#include "livseg/image.hpp"

namespace livseg {

/// sqrt(gx^2 + gy^2) of the 3x3 Sobel responses, replicate border extension.
FloatImage sobel_gradient_magnitude(const GrayImage8& img);

}  // namespace livseg
