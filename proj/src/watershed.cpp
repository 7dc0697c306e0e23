#include "livseg/watershed.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>

#include "livseg/enhance.hpp"
#include "livseg/gradient.hpp"

namespace livseg {

namespace {

struct FloodEntry {
    double level;
    std::uint64_t seq;
    int pixel;
};

struct LaterFirst {
    bool operator()(const FloodEntry& a, const FloodEntry& b) const noexcept
    {
        if (a.level != b.level) {
            return a.level > b.level;
        }
        return a.seq > b.seq;
    }
};

enum class FloodState : std::uint8_t { Unseen, Queued, Done };

BinaryImage union_of(const BinaryImage& a, const BinaryImage& b)
{
    BinaryImage out(a.width(), a.height());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = (a[i] || b[i]) ? 1 : 0;
    }
    return out;
}

// Foreground components get labels 1..k, background components k+1..m, so a
// background ridge touching a foreground marker never merges with it.
LabelImage marker_labels(const BinaryImage& fg, const BinaryImage& bg, Connectivity conn)
{
    LabelImage labels = label_components(fg, conn);
    const auto fg_count = num_labels(labels);
    const auto bg_labels = label_components(bg, conn);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (bg_labels[i] != 0) {
            labels[i] = fg_count + bg_labels[i];
        }
    }
    return labels;
}

}  // namespace

void PipelineConfig::validate() const
{
    if (se_radius < 1) {
        throw PreconditionError("se_radius must be >= 1");
    }
    if (min_marker_area < 1) {
        throw PreconditionError("min_marker_area must be >= 1");
    }
    if (fg_shrink_radius < 0) {
        throw PreconditionError("fg_shrink_radius must be >= 0");
    }
}

NoForegroundMarkersError::NoForegroundMarkersError()
    : std::runtime_error("no foreground markers survived cleanup; try a smaller min_marker_area")
{
}

LabelImage watershed_seeded(const FloatImage& relief, const LabelImage& markers,
                            Connectivity conn)
{
    if (!relief.same_shape(markers)) {
        throw PreconditionError("watershed_seeded: dimension mismatch");
    }
    if (std::none_of(markers.pixels().begin(), markers.pixels().end(),
                     [](std::int32_t v) { return v > 0; })) {
        throw PreconditionError("watershed_seeded: no marker pixels");
    }

    const int w = relief.width();
    const auto& nbrs = neighbors(conn);
    LabelImage labels = markers;
    std::vector<FloodState> state(relief.size(), FloodState::Unseen);
    std::priority_queue<FloodEntry, std::vector<FloodEntry>, LaterFirst> queue;
    std::uint64_t seq = 0;

    const auto enqueue_neighbors = [&](int p) {
        const int px = p % w;
        const int py = p / w;
        for (const auto& o : nbrs) {
            const int qx = px + o.dx;
            const int qy = py + o.dy;
            if (!relief.contains(qx, qy)) {
                continue;
            }
            const auto q = static_cast<int>(relief.index(qx, qy));
            if (state[q] == FloodState::Unseen) {
                state[q] = FloodState::Queued;
                queue.push({relief[q], seq++, q});
            }
        }
    };

    for (std::size_t i = 0; i < markers.size(); ++i) {
        if (markers[i] > 0) {
            state[i] = FloodState::Done;
        } else {
            labels[i] = 0;
        }
    }
    for (int p = 0; p < static_cast<int>(markers.size()); ++p) {
        if (markers[p] > 0) {
            enqueue_neighbors(p);
        }
    }

    while (!queue.empty()) {
        const int p = queue.top().pixel;
        queue.pop();
        state[p] = FloodState::Done;

        std::int32_t label = 0;
        bool conflict = false;
        const int px = p % w;
        const int py = p / w;
        for (const auto& o : nbrs) {
            const int qx = px + o.dx;
            const int qy = py + o.dy;
            if (!relief.contains(qx, qy)) {
                continue;
            }
            const auto l = labels(qx, qy);
            if (l <= 0) {
                continue;
            }
            if (label == 0) {
                label = l;
            } else if (l != label) {
                conflict = true;
                break;
            }
        }
        if (conflict || label == 0) {
            labels[p] = 0;
            continue;
        }
        labels[p] = label;
        enqueue_neighbors(p);
    }
    return labels;
}

LabelImage watershed_unseeded(const FloatImage& relief, Connectivity conn)
{
    const auto minima = regional_minima(relief, conn);
    return watershed_seeded(relief, label_components(minima, conn), conn);
}

SegmentationResult segment(const GrayImage8& img, const PipelineConfig& cfg)
{
    cfg.validate();
    if (img.width() < 8 || img.height() < 8) {
        throw PreconditionError("segment: image must be at least 8x8");
    }
    const Connectivity conn = cfg.connectivity;
    const int w = img.width();
    const int h = img.height();

    SegmentationResult result;
    const auto add_stage = [&](std::string_view name, auto image) {
        result.stages.push_back(Stage{std::string(name), std::move(image)});
    };

    const BinaryImage input_binary =
        binarize(img, otsu_threshold(histogram(img)).threshold);

    const FloatImage grad = sobel_gradient_magnitude(img);
    const GrayImage8 grad_u8 = rescale_to_u8(grad);

    const auto se = StructuringElement::disk(cfg.se_radius);
    const GrayImage8 opened = open_by_reconstruction(img, se, conn);
    const GrayImage8 oc = close_by_reconstruction(opened, se, conn);

    const BinaryImage maxima = regional_maxima(oc, conn);
    const OtsuResult oc_otsu = otsu_threshold(histogram(oc));
    const BinaryImage bw = binarize(oc, oc_otsu.threshold);

    add_stage(kStageNames[0], img);
    add_stage(kStageNames[1], mask_to_gray(input_binary));
    add_stage(kStageNames[2], grad_u8);
    add_stage(kStageNames[3], opened);
    add_stage(kStageNames[4], oc);
    add_stage(kStageNames[5], mask_to_gray(maxima));

    if (oc_otsu.degenerate) {
        result.degenerate = true;
        result.labels = LabelImage(w, h, 1);
        result.ridge = BinaryImage(w, h, 0);
        result.fg_markers = BinaryImage(w, h, 0);
        result.bg_markers = BinaryImage(w, h, 0);
        add_stage(kStageNames[6], mask_to_gray(result.fg_markers));
        add_stage(kStageNames[7], mask_to_gray(bw));
        add_stage(kStageNames[8], mask_to_gray(result.bg_markers));
        add_stage(kStageNames[9], grad_u8);
        add_stage(kStageNames[10], render_label_colormap(result.labels));
        add_stage(kStageNames[11], gray_to_rgb(img));
        return result;
    }

    BinaryImage fgm = erode(maxima, StructuringElement::disk(cfg.fg_shrink_radius));
    fgm = remove_small_components(fgm, static_cast<std::size_t>(cfg.min_marker_area), conn);
    if (count_foreground(fgm) == 0) {
        throw NoForegroundMarkersError();
    }

    // Background markers: the influence-zone boundaries between the
    // foreground markers and the thresholded-out background, found as the
    // ridge of a flood over the distance to those obstacles.
    const BinaryImage obstacles = union_of(fgm, complement(bw));
    const FloatImage dist = distance_transform(complement(obstacles));
    const LabelImage zones = watershed_unseeded(dist, conn);
    BinaryImage bgm(w, h, 0);
    for (std::size_t i = 0; i < bgm.size(); ++i) {
        bgm[i] = (zones[i] == 0 && !fgm[i]) ? 1 : 0;
    }

    const GrayImage8 imposed = impose_minima(grad_u8, union_of(fgm, bgm), conn);
    const LabelImage markers = marker_labels(fgm, bgm, conn);
    result.labels = watershed_seeded(to_float(imposed), markers, conn);

    result.ridge = BinaryImage(w, h, 0);
    for (std::size_t i = 0; i < result.labels.size(); ++i) {
        result.ridge[i] = result.labels[i] == 0 ? 1 : 0;
    }
    result.fg_markers = fgm;
    result.bg_markers = bgm;
    result.tumor_label = select_tumor(region_stats(img, result.labels), cfg.tumor_policy);

    const BinaryImage highlight =
        result.tumor_label ? label_mask(result.labels, *result.tumor_label) : result.ridge;

    add_stage(kStageNames[6], mask_to_gray(fgm));
    add_stage(kStageNames[7], mask_to_gray(bw));
    add_stage(kStageNames[8], mask_to_gray(bgm));
    add_stage(kStageNames[9], imposed);
    add_stage(kStageNames[10], render_label_colormap(result.labels));
    add_stage(kStageNames[11], render_overlay(img, highlight, Rgb{255, 0, 0}, 0.5));
    return result;
}

std::vector<RegionStats> region_stats(const GrayImage8& img, const LabelImage& labels)
{
    if (!img.same_shape(labels)) {
        throw PreconditionError("region_stats: dimension mismatch");
    }
    std::vector<RegionStats> stats(static_cast<std::size_t>(num_labels(labels)));
    std::vector<double> sum(stats.size(), 0.0);
    std::vector<double> sum_x(stats.size(), 0.0);
    std::vector<double> sum_y(stats.size(), 0.0);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const auto l = labels(x, y);
            if (l <= 0) {
                continue;
            }
            const auto k = static_cast<std::size_t>(l - 1);
            ++stats[k].area;
            sum[k] += img(x, y);
            sum_x[k] += x;
            sum_y[k] += y;
            if (img.on_border(x, y)) {
                stats[k].touches_border = true;
            }
        }
    }
    for (std::size_t k = 0; k < stats.size(); ++k) {
        if (stats[k].area > 0) {
            const auto n = static_cast<double>(stats[k].area);
            stats[k].mean = sum[k] / n;
            stats[k].centroid_x = sum_x[k] / n;
            stats[k].centroid_y = sum_y[k] / n;
        }
    }
    return stats;
}

std::optional<int> select_tumor(const std::vector<RegionStats>& stats, TumorPolicy policy)
{
    std::vector<int> candidates;
    double interior_sum = 0.0;
    std::size_t interior_area = 0;
    for (std::size_t k = 0; k < stats.size(); ++k) {
        if (stats[k].area > 0 && !stats[k].touches_border) {
            candidates.push_back(static_cast<int>(k));
            interior_sum += stats[k].mean * static_cast<double>(stats[k].area);
            interior_area += stats[k].area;
        }
    }
    if (candidates.empty()) {
        return std::nullopt;
    }

    int best = candidates.front();
    double best_score = -1.0;
    for (const int k : candidates) {
        const auto& s = stats[static_cast<std::size_t>(k)];
        double score = 0.0;
        if (policy == TumorPolicy::LargestInterior) {
            score = static_cast<double>(s.area);
        } else {
            const std::size_t rest_area = interior_area - s.area;
            if (rest_area > 0) {
                const double rest_mean =
                    (interior_sum - s.mean * static_cast<double>(s.area)) /
                    static_cast<double>(rest_area);
                score = std::abs(s.mean - rest_mean);
            }
        }
        if (score > best_score) {
            best_score = score;
            best = k;
        }
    }
    return best + 1;
}

Rgb label_color(std::int32_t label)
{
    if (label <= 0) {
        return Rgb{0, 0, 0};
    }
    constexpr double golden = 0.618033988749895;
    constexpr double s = 0.85;
    constexpr double v = 1.0;
    const double hue = std::fmod(label * golden, 1.0);
    const double h6 = hue * 6.0;
    const int sector = static_cast<int>(std::floor(h6)) % 6;
    const double f = h6 - std::floor(h6);
    const double p = v * (1.0 - s);
    const double q = v * (1.0 - s * f);
    const double t = v * (1.0 - s * (1.0 - f));
    double r = 0.0;
    double g = 0.0;
    double b = 0.0;
    switch (sector) {
        case 0: r = v; g = t; b = p; break;
        case 1: r = q; g = v; b = p; break;
        case 2: r = p; g = v; b = t; break;
        case 3: r = p; g = q; b = v; break;
        case 4: r = t; g = p; b = v; break;
        default: r = v; g = p; b = q; break;
    }
    return Rgb{round_to_u8(r * 255.0), round_to_u8(g * 255.0), round_to_u8(b * 255.0)};
}

RgbImage render_label_colormap(const LabelImage& labels)
{
    RgbImage out(labels.width(), labels.height());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out[i] = label_color(labels[i]);
    }
    return out;
}

RgbImage render_overlay(const GrayImage8& img, const BinaryImage& mask, Rgb color, double alpha)
{
    if (!img.same_shape(mask)) {
        throw PreconditionError("render_overlay: dimension mismatch");
    }
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw PreconditionError("render_overlay: alpha must lie in [0,1]");
    }
    RgbImage out = gray_to_rgb(img);
    const auto blend = [alpha](std::uint8_t v, std::uint8_t c) {
        return round_to_u8((1.0 - alpha) * v + alpha * c);
    };
    for (std::size_t i = 0; i < img.size(); ++i) {
        if (mask[i]) {
            out[i] = Rgb{blend(img[i], color.r), blend(img[i], color.g), blend(img[i], color.b)};
        }
    }
    return out;
}

}  // namespace livseg
