#include "livseg/enhance.hpp"

#include <algorithm>

namespace livseg {

namespace {
__extension__ typedef __int128 Int128;
}  // namespace

Histogram histogram(const GrayImage8& img)
{
    Histogram h;
    for (const auto v : img.pixels()) {
        ++h.counts[v];
    }
    h.total = img.size();
    return h;
}

OtsuResult otsu_threshold(const Histogram& hist)
{
    if (hist.total == 0) {
        throw PreconditionError("otsu_threshold: empty histogram");
    }
    std::uint64_t summed = 0;
    for (const auto c : hist.counts) {
        summed += c;
    }
    if (summed != hist.total) {
        throw PreconditionError("otsu_threshold: histogram total does not match its counts");
    }

    const auto occupied = std::count_if(hist.counts.begin(), hist.counts.end(),
                                        [](std::uint64_t c) { return c > 0; });
    if (occupied == 1) {
        const auto bin = std::find_if(hist.counts.begin(), hist.counts.end(),
                                      [](std::uint64_t c) { return c > 0; });
        return OtsuResult{static_cast<int>(bin - hist.counts.begin()), 0.0, true};
    }

    // Running class-0 count and first moment, accumulated exactly in
    // integers: sigma_B^2(t) = (S0*T - S*N0)^2 / (T^2 * N0 * N1).
    const auto total = static_cast<Int128>(hist.total);
    Int128 grand_moment = 0;
    for (int i = 0; i < 256; ++i) {
        grand_moment += static_cast<Int128>(i) * hist.counts[i];
    }

    std::array<double, 255> score{};
    Int128 lower_count = 0;
    Int128 lower_moment = 0;
    for (int t = 0; t < 255; ++t) {
        lower_count += hist.counts[t];
        lower_moment += static_cast<Int128>(t) * hist.counts[t];
        if (lower_count == 0 || lower_count == total) {
            score[t] = 0.0;
            continue;
        }
        const auto diff = static_cast<double>(lower_moment * total - grand_moment * lower_count);
        const double d = diff / static_cast<double>(total);
        score[t] = d * d /
                   (static_cast<double>(lower_count) * static_cast<double>(total - lower_count));
    }
    const double best = *std::max_element(score.begin(), score.end());

    long long sum_t = 0;
    long long n_ties = 0;
    for (int t = 0; t < 255; ++t) {
        if (score[t] >= best * (1.0 - kOtsuTieTolerance)) {
            sum_t += t;
            ++n_ties;
        }
    }
    const int threshold = static_cast<int>(sum_t / n_ties);
    return OtsuResult{threshold, score[threshold], false};
}

BinaryImage binarize(const GrayImage8& img, int t)
{
    BinaryImage out(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        out[i] = img[i] > t ? 1 : 0;
    }
    return out;
}

}  // namespace livseg
