#include "livseg/morphology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

namespace livseg {

namespace {

const std::vector<Offset> kFour{{0, -1}, {-1, 0}, {1, 0}, {0, 1}};
const std::vector<Offset> kEight{{-1, -1}, {0, -1}, {1, -1}, {-1, 0},
                                 {1, 0},   {-1, 1}, {0, 1},  {1, 1}};

// Neighbors preceding / following a pixel in raster order.
std::vector<Offset> causal_neighbors(Connectivity conn, bool before)
{
    std::vector<Offset> out;
    for (const auto& o : neighbors(conn)) {
        const bool precedes = o.dy < 0 || (o.dy == 0 && o.dx < 0);
        if (precedes == before) {
            out.push_back(o);
        }
    }
    return out;
}

template <typename Image>
void require_same_shape(const Image& a, const Image& b, const char* op)
{
    if (!a.same_shape(b)) {
        throw PreconditionError(std::string(op) + ": dimension mismatch");
    }
}

template <typename T, typename Tag, typename Pick>
Raster<T, Tag> rank_filter(const Raster<T, Tag>& img, const StructuringElement& se, T outside,
                           Pick pick)
{
    Raster<T, Tag> out(img.width(), img.height());
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            T acc = img(x, y);
            for (const auto& o : se.offsets()) {
                const int qx = x + o.dx;
                const int qy = y + o.dy;
                acc = pick(acc, img.contains(qx, qy) ? img(qx, qy) : outside);
            }
            out(x, y) = acc;
        }
    }
    return out;
}

// Compares plateaus against their surroundings: `beats(a, b)` is true when a
// neighbor value a disqualifies a plateau at value b.
template <typename T, typename Tag, typename Beats>
BinaryImage regional_extrema(const Raster<T, Tag>& img, Connectivity conn, Beats beats)
{
    const int w = img.width();
    const int h = img.height();
    BinaryImage out(w, h, 0);
    std::vector<bool> visited(img.size(), false);
    std::vector<int> component;
    std::vector<int> stack;
    const auto& nbrs = neighbors(conn);

    for (int start = 0; start < static_cast<int>(img.size()); ++start) {
        if (visited[start]) {
            continue;
        }
        const T level = img[start];
        bool extremum = true;
        component.clear();
        stack.assign(1, start);
        visited[start] = true;
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            component.push_back(p);
            const int px = p % w;
            const int py = p / w;
            for (const auto& o : nbrs) {
                const int qx = px + o.dx;
                const int qy = py + o.dy;
                if (!img.contains(qx, qy)) {
                    continue;
                }
                const int q = qy * w + qx;
                const T v = img[q];
                if (v == level) {
                    if (!visited[q]) {
                        visited[q] = true;
                        stack.push_back(q);
                    }
                } else if (beats(v, level)) {
                    extremum = false;
                }
            }
        }
        if (extremum) {
            for (const int p : component) {
                out[p] = 1;
            }
        }
    }
    return out;
}

// Squared distance lower envelope of parabolas rooted at f (Felzenszwalb &
// Huttenlocher). f is +inf at foreground, 0 at background.
void squared_distance_1d(const std::vector<double>& f, std::vector<double>& d,
                         std::vector<int>& v, std::vector<double>& z)
{
    const int n = static_cast<int>(f.size());
    constexpr double inf = std::numeric_limits<double>::infinity();
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] == inf) {
            continue;
        }
        if (k < 0) {
            k = 0;
            v[0] = q;
            z[0] = -inf;
            z[1] = inf;
            continue;
        }
        double s = 0.0;
        while (true) {
            const int r = v[k];
            s = ((f[q] + double(q) * q) - (f[r] + double(r) * r)) / (2.0 * (q - r));
            // z[0] is -inf, so this always stops at k == 0.
            if (s > z[k]) {
                break;
            }
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = inf;
    }
    if (k < 0) {
        std::fill(d.begin(), d.end(), inf);
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[j + 1] < q) {
            ++j;
        }
        const double dq = q - v[j];
        d[q] = dq * dq + f[v[j]];
    }
}

}  // namespace

const std::vector<Offset>& neighbors(Connectivity conn)
{
    return conn == Connectivity::Four ? kFour : kEight;
}

StructuringElement::StructuringElement(std::vector<Offset> offsets) : offsets_(std::move(offsets))
{
    if (std::find(offsets_.begin(), offsets_.end(), Offset{0, 0}) == offsets_.end()) {
        throw PreconditionError("structuring element must contain the origin");
    }
    for (const auto& o : offsets_) {
        if (std::find(offsets_.begin(), offsets_.end(), Offset{-o.dx, -o.dy}) == offsets_.end()) {
            throw PreconditionError("structuring element must be symmetric; missing (" +
                                    std::to_string(-o.dx) + "," + std::to_string(-o.dy) + ")");
        }
    }
}

StructuringElement StructuringElement::disk(int radius)
{
    if (radius < 0) {
        throw PreconditionError("disk radius must be non-negative");
    }
    std::vector<Offset> offsets;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            if (dx * dx + dy * dy <= radius * radius) {
                offsets.push_back({dx, dy});
            }
        }
    }
    return StructuringElement(std::move(offsets));
}

StructuringElement StructuringElement::unit(Connectivity conn)
{
    auto offsets = neighbors(conn);
    offsets.push_back({0, 0});
    return StructuringElement(std::move(offsets));
}

GrayImage8 erode(const GrayImage8& img, const StructuringElement& se)
{
    return rank_filter(img, se, std::uint8_t{255},
                       [](std::uint8_t a, std::uint8_t b) { return std::min(a, b); });
}

GrayImage8 dilate(const GrayImage8& img, const StructuringElement& se)
{
    return rank_filter(img, se, std::uint8_t{0},
                       [](std::uint8_t a, std::uint8_t b) { return std::max(a, b); });
}

BinaryImage erode(const BinaryImage& mask, const StructuringElement& se)
{
    return rank_filter(mask, se, std::uint8_t{1},
                       [](std::uint8_t a, std::uint8_t b) { return std::min(a, b); });
}

BinaryImage dilate(const BinaryImage& mask, const StructuringElement& se)
{
    return rank_filter(mask, se, std::uint8_t{0},
                       [](std::uint8_t a, std::uint8_t b) { return std::max(a, b); });
}

// Raster and anti-raster sweeps followed by FIFO propagation (Vincent's
// hybrid algorithm); converges to the same fixpoint as naive iteration.
GrayImage8 reconstruct_by_dilation(const GrayImage8& marker, const GrayImage8& mask,
                                   Connectivity conn)
{
    require_same_shape(marker, mask, "reconstruct_by_dilation");
    const int w = mask.width();
    const int h = mask.height();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (marker(x, y) > mask(x, y)) {
                throw PreconditionError("reconstruct_by_dilation: marker exceeds mask at (" +
                                        std::to_string(x) + "," + std::to_string(y) + ")");
            }
        }
    }

    GrayImage8 out = marker;
    const auto before = causal_neighbors(conn, true);
    const auto after = causal_neighbors(conn, false);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::uint8_t m = out(x, y);
            for (const auto& o : before) {
                if (out.contains(x + o.dx, y + o.dy)) {
                    m = std::max(m, out(x + o.dx, y + o.dy));
                }
            }
            out(x, y) = std::min(m, mask(x, y));
        }
    }

    std::deque<int> fifo;
    for (int y = h - 1; y >= 0; --y) {
        for (int x = w - 1; x >= 0; --x) {
            std::uint8_t m = out(x, y);
            for (const auto& o : after) {
                if (out.contains(x + o.dx, y + o.dy)) {
                    m = std::max(m, out(x + o.dx, y + o.dy));
                }
            }
            const std::uint8_t value = std::min(m, mask(x, y));
            out(x, y) = value;
            for (const auto& o : after) {
                const int qx = x + o.dx;
                const int qy = y + o.dy;
                if (out.contains(qx, qy) && out(qx, qy) < value && out(qx, qy) < mask(qx, qy)) {
                    fifo.push_back(y * w + x);
                    break;
                }
            }
        }
    }

    const auto& nbrs = neighbors(conn);
    while (!fifo.empty()) {
        const int p = fifo.front();
        fifo.pop_front();
        const int px = p % w;
        const int py = p / w;
        const std::uint8_t value = out[p];
        for (const auto& o : nbrs) {
            const int qx = px + o.dx;
            const int qy = py + o.dy;
            if (!out.contains(qx, qy)) {
                continue;
            }
            const std::size_t q = out.index(qx, qy);
            if (out[q] < value && out[q] != mask[q]) {
                out[q] = std::min(value, mask[q]);
                fifo.push_back(static_cast<int>(q));
            }
        }
    }
    return out;
}

GrayImage8 reconstruct_by_erosion(const GrayImage8& marker, const GrayImage8& mask,
                                  Connectivity conn)
{
    require_same_shape(marker, mask, "reconstruct_by_erosion");
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            if (marker(x, y) < mask(x, y)) {
                throw PreconditionError("reconstruct_by_erosion: marker below mask at (" +
                                        std::to_string(x) + "," + std::to_string(y) + ")");
            }
        }
    }
    return complement(reconstruct_by_dilation(complement(marker), complement(mask), conn));
}

GrayImage8 open_by_reconstruction(const GrayImage8& img, const StructuringElement& se,
                                  Connectivity conn)
{
    return reconstruct_by_dilation(erode(img, se), img, conn);
}

GrayImage8 close_by_reconstruction(const GrayImage8& img, const StructuringElement& se,
                                   Connectivity conn)
{
    return reconstruct_by_erosion(dilate(img, se), img, conn);
}

BinaryImage regional_maxima(const GrayImage8& img, Connectivity conn)
{
    return regional_extrema(img, conn, [](std::uint8_t n, std::uint8_t v) { return n > v; });
}

BinaryImage regional_minima(const GrayImage8& img, Connectivity conn)
{
    return regional_extrema(img, conn, [](std::uint8_t n, std::uint8_t v) { return n < v; });
}

BinaryImage regional_minima(const FloatImage& img, Connectivity conn)
{
    return regional_extrema(img, conn, [](double n, double v) { return n < v; });
}

GrayImage8 impose_minima(const GrayImage8& img, const BinaryImage& minima, Connectivity conn)
{
    if (!img.same_shape(minima)) {
        throw PreconditionError("impose_minima: dimension mismatch");
    }
    if (count_foreground(minima) == 0) {
        throw PreconditionError("impose_minima: empty minima mask");
    }
    GrayImage8 fm(img.width(), img.height());
    GrayImage8 ceiling(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) {
        fm[i] = minima[i] ? 0 : 255;
        const auto raised = static_cast<std::uint8_t>(std::min(255, img[i] + 1));
        ceiling[i] = std::min(fm[i], raised);
    }
    return reconstruct_by_erosion(fm, ceiling, conn);
}

FloatImage distance_transform(const BinaryImage& bw)
{
    const int w = bw.width();
    const int h = bw.height();
    if (count_foreground(bw) == bw.size()) {
        return FloatImage(w, h, static_cast<double>(w + h));
    }

    constexpr double inf = std::numeric_limits<double>::infinity();
    const int n = std::max(w, h);
    std::vector<double> f(n), d(n), z(n + 1);
    std::vector<int> v(n);
    FloatImage sq(w, h);

    for (int x = 0; x < w; ++x) {
        f.resize(h);
        d.resize(h);
        for (int y = 0; y < h; ++y) {
            f[y] = bw(x, y) ? inf : 0.0;
        }
        squared_distance_1d(f, d, v, z);
        for (int y = 0; y < h; ++y) {
            sq(x, y) = d[y];
        }
    }
    FloatImage out(w, h);
    for (int y = 0; y < h; ++y) {
        f.resize(w);
        d.resize(w);
        for (int x = 0; x < w; ++x) {
            f[x] = sq(x, y);
        }
        squared_distance_1d(f, d, v, z);
        for (int x = 0; x < w; ++x) {
            out(x, y) = std::sqrt(d[x]);
        }
    }
    return out;
}

LabelImage label_components(const BinaryImage& mask, Connectivity conn)
{
    const int w = mask.width();
    LabelImage labels(mask.width(), mask.height(), 0);
    const auto& nbrs = neighbors(conn);
    std::vector<int> stack;
    std::int32_t next = 0;
    for (int start = 0; start < static_cast<int>(mask.size()); ++start) {
        if (!mask[start] || labels[start] != 0) {
            continue;
        }
        ++next;
        labels[start] = next;
        stack.assign(1, start);
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            for (const auto& o : nbrs) {
                const int qx = p % w + o.dx;
                const int qy = p / w + o.dy;
                if (!mask.contains(qx, qy)) {
                    continue;
                }
                const auto q = mask.index(qx, qy);
                if (mask[q] && labels[q] == 0) {
                    labels[q] = next;
                    stack.push_back(static_cast<int>(q));
                }
            }
        }
    }
    return labels;
}

BinaryImage remove_small_components(const BinaryImage& mask, std::size_t min_area,
                                    Connectivity conn)
{
    const auto labels = label_components(mask, conn);
    std::vector<std::size_t> area(static_cast<std::size_t>(num_labels(labels)) + 1, 0);
    for (const auto l : labels.pixels()) {
        ++area[static_cast<std::size_t>(l)];
    }
    BinaryImage out(mask.width(), mask.height(), 0);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        const auto l = static_cast<std::size_t>(labels[i]);
        out[i] = (l != 0 && area[l] >= min_area) ? 1 : 0;
    }
    return out;
}

}  // namespace livseg
