#include "livseg/features.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace livseg {

namespace {

const std::vector<double> kHaar{1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};

const std::vector<double> kDaubechies4 = [] {
    const double s3 = std::sqrt(3.0);
    const double norm = 4.0 * std::sqrt(2.0);
    return std::vector<double>{(1.0 + s3) / norm, (3.0 + s3) / norm, (3.0 - s3) / norm,
                               (1.0 - s3) / norm};
}();

// Periodized analysis of an even-length signal.
void analyze(std::span<const double> x, const std::vector<double>& lo,
             const std::vector<double>& hi, std::span<double> approx, std::span<double> detail)
{
    const std::size_t n = x.size();
    for (std::size_t i = 0; i < n / 2; ++i) {
        double a = 0.0;
        double d = 0.0;
        for (std::size_t k = 0; k < lo.size(); ++k) {
            const double v = x[(2 * i + k) % n];
            a += lo[k] * v;
            d += hi[k] * v;
        }
        approx[i] = a;
        detail[i] = d;
    }
}

// Transpose of `analyze`, which is its inverse for an orthonormal pair.
void synthesize(std::span<const double> approx, std::span<const double> detail,
                const std::vector<double>& lo, const std::vector<double>& hi, std::span<double> x)
{
    const std::size_t n = x.size();
    std::fill(x.begin(), x.end(), 0.0);
    for (std::size_t i = 0; i < n / 2; ++i) {
        for (std::size_t k = 0; k < lo.size(); ++k) {
            x[(2 * i + k) % n] += lo[k] * approx[i] + hi[k] * detail[i];
        }
    }
}

FloatImage pad_to_even(const FloatImage& img)
{
    const int w = img.width() + (img.width() % 2);
    const int h = img.height() + (img.height() % 2);
    if (w == img.width() && h == img.height()) {
        return img;
    }
    FloatImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            out(x, y) = img(std::min(x, img.width() - 1), std::min(y, img.height() - 1));
        }
    }
    return out;
}

struct Quad {
    FloatImage ll, lh, hl, hh;
};

Quad analyze_2d(const FloatImage& even, WaveletKind kind)
{
    const auto& lo = lowpass_filter(kind);
    const auto hi = highpass_filter(kind);
    const int w = even.width();
    const int h = even.height();
    const int hw = w / 2;
    const int hh = h / 2;

    FloatImage row_lo(hw, h);
    FloatImage row_hi(hw, h);
    std::vector<double> line(static_cast<std::size_t>(std::max(w, h)));
    std::vector<double> a(line.size() / 2 + 1);
    std::vector<double> d(line.size() / 2 + 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            line[x] = even(x, y);
        }
        analyze(std::span(line).first(w), lo, hi, a, d);
        for (int x = 0; x < hw; ++x) {
            row_lo(x, y) = a[x];
            row_hi(x, y) = d[x];
        }
    }

    Quad q{FloatImage(hw, hh), FloatImage(hw, hh), FloatImage(hw, hh), FloatImage(hw, hh)};
    const auto columns = [&](const FloatImage& src, FloatImage& low, FloatImage& high) {
        for (int x = 0; x < hw; ++x) {
            for (int y = 0; y < h; ++y) {
                line[y] = src(x, y);
            }
            analyze(std::span(line).first(h), lo, hi, a, d);
            for (int y = 0; y < hh; ++y) {
                low(x, y) = a[y];
                high(x, y) = d[y];
            }
        }
    };
    columns(row_lo, q.ll, q.lh);
    columns(row_hi, q.hl, q.hh);
    return q;
}

FloatImage synthesize_2d(const Quad& q, WaveletKind kind)
{
    const auto& lo = lowpass_filter(kind);
    const auto hi = highpass_filter(kind);
    const int hw = q.ll.width();
    const int hh = q.ll.height();
    const int w = hw * 2;
    const int h = hh * 2;

    FloatImage row_lo(hw, h);
    FloatImage row_hi(hw, h);
    std::vector<double> a(static_cast<std::size_t>(std::max(hw, hh)));
    std::vector<double> d(a.size());
    std::vector<double> line(static_cast<std::size_t>(std::max(w, h)));
    const auto columns = [&](const FloatImage& low, const FloatImage& high, FloatImage& dst) {
        for (int x = 0; x < hw; ++x) {
            for (int y = 0; y < hh; ++y) {
                a[y] = low(x, y);
                d[y] = high(x, y);
            }
            synthesize(std::span(a).first(hh), std::span(d).first(hh), lo, hi,
                       std::span(line).first(h));
            for (int y = 0; y < h; ++y) {
                dst(x, y) = line[y];
            }
        }
    };
    columns(q.ll, q.lh, row_lo);
    columns(q.hl, q.hh, row_hi);

    FloatImage out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < hw; ++x) {
            a[x] = row_lo(x, y);
            d[x] = row_hi(x, y);
        }
        synthesize(std::span(a).first(hw), std::span(d).first(hw), lo, hi,
                   std::span(line).first(w));
        for (int x = 0; x < w; ++x) {
            out(x, y) = line[x];
        }
    }
    return out;
}

double energy(const FloatImage& img)
{
    double e = 0.0;
    for (const double v : img.pixels()) {
        e += v * v;
    }
    return e;
}

int half_up(int n) { return (n + 1) / 2; }

}  // namespace

const std::vector<double>& lowpass_filter(WaveletKind kind)
{
    return kind == WaveletKind::Haar ? kHaar : kDaubechies4;
}

std::vector<double> highpass_filter(WaveletKind kind)
{
    const auto& lo = lowpass_filter(kind);
    const std::size_t n = lo.size();
    std::vector<double> hi(n);
    for (std::size_t k = 0; k < n; ++k) {
        hi[k] = (k % 2 == 0 ? 1.0 : -1.0) * lo[n - 1 - k];
    }
    return hi;
}

std::string band_name(Band band)
{
    switch (band) {
        case Band::LH: return "LH";
        case Band::HL: return "HL";
        case Band::HH: return "HH";
        case Band::LL: return "LL";
    }
    return "LL";
}

int max_dwt_levels(int width, int height)
{
    int levels = 0;
    while (width >= 2 && height >= 2) {
        ++levels;
        width = half_up(width);
        height = half_up(height);
    }
    return levels;
}

SubbandPyramid dwt2(const FloatImage& img, WaveletKind kind, int levels)
{
    if (img.empty()) {
        throw PreconditionError("dwt2: empty image");
    }
    if (levels < 1) {
        throw PreconditionError("dwt2: levels must be >= 1");
    }
    const int feasible = max_dwt_levels(img.width(), img.height());
    if (levels > feasible) {
        throw PreconditionError("dwt2: " + std::to_string(levels) + " levels requested for " +
                                std::to_string(img.width()) + "x" + std::to_string(img.height()) +
                                "; at most " + std::to_string(feasible) + " are feasible");
    }

    SubbandPyramid pyr;
    pyr.original_width = img.width();
    pyr.original_height = img.height();
    FloatImage current = img;
    for (int level = 0; level < levels; ++level) {
        const int in_w = current.width();
        const int in_h = current.height();
        Quad q = analyze_2d(pad_to_even(current), kind);
        pyr.details.push_back(
            DetailLevel{std::move(q.lh), std::move(q.hl), std::move(q.hh), in_w, in_h});
        current = std::move(q.ll);
    }
    pyr.approximation = std::move(current);
    return pyr;
}

FloatImage idwt2(const SubbandPyramid& pyr, WaveletKind kind)
{
    if (pyr.details.empty() || pyr.approximation.empty()) {
        throw PreconditionError("idwt2: empty pyramid");
    }
    if (pyr.details.front().input_width != pyr.original_width ||
        pyr.details.front().input_height != pyr.original_height) {
        throw PreconditionError("idwt2: first level does not match original dimensions");
    }
    for (std::size_t k = 0; k < pyr.details.size(); ++k) {
        const auto& lvl = pyr.details[k];
        const int w = half_up(lvl.input_width);
        const int h = half_up(lvl.input_height);
        const auto fits = [&](const FloatImage& band) {
            return band.width() == w && band.height() == h;
        };
        if (!fits(lvl.lh) || !fits(lvl.hl) || !fits(lvl.hh)) {
            throw PreconditionError("idwt2: malformed subband dimensions at level " +
                                    std::to_string(k + 1));
        }
        const bool last = k + 1 == pyr.details.size();
        const int next_w = last ? pyr.approximation.width() : pyr.details[k + 1].input_width;
        const int next_h = last ? pyr.approximation.height() : pyr.details[k + 1].input_height;
        if (next_w != w || next_h != h) {
            throw PreconditionError("idwt2: level " + std::to_string(k + 2) +
                                    " does not match the subbands of level " +
                                    std::to_string(k + 1));
        }
    }

    FloatImage current = pyr.approximation;
    for (auto it = pyr.details.rbegin(); it != pyr.details.rend(); ++it) {
        const FloatImage padded = synthesize_2d(Quad{current, it->lh, it->hl, it->hh}, kind);
        FloatImage cropped(it->input_width, it->input_height);
        for (int y = 0; y < it->input_height; ++y) {
            for (int x = 0; x < it->input_width; ++x) {
                cropped(x, y) = padded(x, y);
            }
        }
        current = std::move(cropped);
    }
    return current;
}

FeatureVector extract_features(const GrayImage8& img, const BinaryImage& region,
                               WaveletKind kind, int levels)
{
    if (!img.same_shape(region)) {
        throw PreconditionError("extract_features: dimension mismatch");
    }
    if (levels < 1) {
        throw PreconditionError("extract_features: levels must be >= 1");
    }
    int x0 = img.width();
    int y0 = img.height();
    int x1 = -1;
    int y1 = -1;
    double sum = 0.0;
    std::size_t area = 0;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            if (!region(x, y)) {
                continue;
            }
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
            sum += img(x, y);
            ++area;
        }
    }
    if (area == 0) {
        throw PreconditionError("extract_features: empty region");
    }

    const int box_w = x1 - x0 + 1;
    const int box_h = y1 - y0 + 1;
    const int block = 1 << levels;
    if (box_w < block || box_h < block) {
        throw PreconditionError("extract_features: region bounding box " + std::to_string(box_w) +
                                "x" + std::to_string(box_h) + " is smaller than 2^" +
                                std::to_string(levels) + "; use fewer levels");
    }

    FeatureVector fv;
    fv.area = area;
    fv.mean = sum / static_cast<double>(area);
    double sq = 0.0;
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (region[i]) {
            const double dv = img[i] - fv.mean;
            sq += dv * dv;
        }
    }
    fv.std_dev = std::sqrt(sq / static_cast<double>(area));

    const int pad_w = (box_w + block - 1) / block * block;
    const int pad_h = (box_h + block - 1) / block * block;
    FloatImage box(pad_w, pad_h);
    for (int y = 0; y < pad_h; ++y) {
        for (int x = 0; x < pad_w; ++x) {
            const int sx = x0 + std::min(x, box_w - 1);
            const int sy = y0 + std::min(y, box_h - 1);
            box(x, y) = region(sx, sy) ? img(sx, sy) - fv.mean : 0.0;
        }
    }

    const SubbandPyramid pyr = dwt2(box, kind, levels);
    for (int level = 0; level < pyr.levels(); ++level) {
        const auto& lvl = pyr.details[static_cast<std::size_t>(level)];
        fv.subbands.push_back({level + 1, Band::LH, energy(lvl.lh)});
        fv.subbands.push_back({level + 1, Band::HL, energy(lvl.hl)});
        fv.subbands.push_back({level + 1, Band::HH, energy(lvl.hh)});
    }
    fv.subbands.push_back({pyr.levels(), Band::LL, energy(pyr.approximation)});

    double total = 0.0;
    for (const auto& sb : fv.subbands) {
        total += sb.energy;
    }
    for (auto& sb : fv.subbands) {
        sb.norm_energy = total < 1e-12 ? 0.0 : sb.energy / total;
        sb.log_energy = std::log1p(sb.energy);
    }
    return fv;
}

}  // namespace livseg
