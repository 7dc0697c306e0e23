#include "livseg/gradient.hpp"

#include <algorithm>
#include <cmath>

namespace livseg {

FloatImage sobel_gradient_magnitude(const GrayImage8& img)
{
    const int w = img.width();
    const int h = img.height();
    const auto at = [&](int x, int y) {
        return static_cast<double>(img(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)));
    };

    FloatImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = (at(x + 1, y - 1) + 2.0 * at(x + 1, y) + at(x + 1, y + 1)) -
                              (at(x - 1, y - 1) + 2.0 * at(x - 1, y) + at(x - 1, y + 1));
            const double gy = (at(x - 1, y + 1) + 2.0 * at(x, y + 1) + at(x + 1, y + 1)) -
                              (at(x - 1, y - 1) + 2.0 * at(x, y - 1) + at(x + 1, y - 1));
            out(x, y) = std::sqrt(gx * gx + gy * gy);
        }
    }
    return out;
}

}  // namespace livseg
