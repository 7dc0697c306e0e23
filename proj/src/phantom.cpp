#include "livseg/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <thread>

namespace livseg {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) noexcept
{
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
{
    return (x << k) | (x >> (64 - k));
}

void check_intensity(double v, const char* what)
{
    if (!(v >= 0.0 && v <= 255.0)) {
        throw PreconditionError(std::string(what) + " must lie in [0,255]");
    }
}

void check_in_frame(const Ellipse& e, int w, int h, const std::string& what)
{
    if (!(e.semi_x > 0.0 && e.semi_y > 0.0)) {
        throw PreconditionError(what + " semi-axes must be positive");
    }
    const double c = std::cos(e.angle);
    const double s = std::sin(e.angle);
    const double ex = std::hypot(e.semi_x * c, e.semi_y * s);
    const double ey = std::hypot(e.semi_x * s, e.semi_y * c);
    if (e.cx - ex < 0.0 || e.cy - ey < 0.0 || e.cx + ex > w - 1 || e.cy + ey > h - 1) {
        throw PreconditionError(what + " extends outside the frame");
    }
}

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed)
{
    std::uint64_t state = seed;
    for (auto& word : s_) {
        word = splitmix64(state);
    }
}

std::uint64_t Xoshiro256::next() noexcept
{
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Xoshiro256::uniform() noexcept
{
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double Xoshiro256::gaussian() noexcept
{
    if (spare_) {
        const double z = *spare_;
        spare_.reset();
        return z;
    }
    // 1 - u keeps the logarithm finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    return r * std::cos(theta);
}

bool Ellipse::contains(double x, double y) const noexcept
{
    const double dx = x - cx;
    const double dy = y - cy;
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double u = (dx * c + dy * s) / semi_x;
    const double v = (-dx * s + dy * c) / semi_y;
    return u * u + v * v <= 1.0;
}

void PhantomConfig::validate() const
{
    if (width < 8 || height < 8) {
        throw PreconditionError("phantom must be at least 8x8");
    }
    check_intensity(organ_mean, "organ mean");
    check_intensity(background_mean, "background mean");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
        throw PreconditionError("noise sigma must be finite and non-negative");
    }
    check_in_frame(organ, width, height, "organ");
    for (std::size_t t = 0; t < tumors.size(); ++t) {
        const auto name = "tumor " + std::to_string(t + 1);
        check_in_frame(tumors[t].shape, width, height, name);
        check_intensity(tumors[t].mean, "tumor mean");
        if (tumors[t].mean == organ_mean) {
            throw PreconditionError(name + " has zero contrast against the organ");
        }
    }

    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            int hits = 0;
            for (std::size_t t = 0; t < tumors.size(); ++t) {
                if (!tumors[t].shape.contains(x, y)) {
                    continue;
                }
                ++hits;
                if (!organ.contains(x, y)) {
                    throw PreconditionError("tumor " + std::to_string(t + 1) +
                                            " extends outside the organ");
                }
            }
            if (hits > 1) {
                throw PreconditionError("tumor ellipses overlap at (" + std::to_string(x) + "," +
                                        std::to_string(y) + ")");
            }
        }
    }
}

Phantom generate_phantom(const PhantomConfig& cfg)
{
    cfg.validate();
    Phantom out{GrayImage8(cfg.width, cfg.height), LabelImage(cfg.width, cfg.height, 0)};
    Xoshiro256 rng(cfg.seed);
    for (int y = 0; y < cfg.height; ++y) {
        for (int x = 0; x < cfg.width; ++x) {
            double mean = cfg.background_mean;
            std::int32_t label = 0;
            if (cfg.organ.contains(x, y)) {
                mean = cfg.organ_mean;
                label = 1;
            }
            for (std::size_t t = 0; t < cfg.tumors.size(); ++t) {
                if (cfg.tumors[t].shape.contains(x, y)) {
                    mean = cfg.tumors[t].mean;
                    label = static_cast<std::int32_t>(t) + 2;
                }
            }
            // One draw per pixel whatever sigma is, so sigma only scales the noise.
            const double noise = rng.gaussian();
            out.image(x, y) = round_to_u8(mean + cfg.noise_sigma * noise);
            out.truth(x, y) = label;
        }
    }
    return out;
}

BinaryImage tumor_mask(const LabelImage& truth)
{
    BinaryImage out(truth.width(), truth.height());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        out[i] = truth[i] >= 2 ? 1 : 0;
    }
    return out;
}

namespace {

struct Overlap {
    std::size_t a = 0;
    std::size_t b = 0;
    std::size_t both = 0;
};

Overlap overlap(const BinaryImage& a, const BinaryImage& b)
{
    if (!a.same_shape(b)) {
        throw PreconditionError("overlap metric: dimension mismatch");
    }
    Overlap o;
    for (std::size_t i = 0; i < a.size(); ++i) {
        o.a += a[i] ? 1 : 0;
        o.b += b[i] ? 1 : 0;
        o.both += (a[i] && b[i]) ? 1 : 0;
    }
    return o;
}

}  // namespace

double dice(const BinaryImage& a, const BinaryImage& b)
{
    const auto o = overlap(a, b);
    if (o.a + o.b == 0) {
        return 1.0;
    }
    return 2.0 * static_cast<double>(o.both) / static_cast<double>(o.a + o.b);
}

double jaccard(const BinaryImage& a, const BinaryImage& b)
{
    const auto o = overlap(a, b);
    const std::size_t uni = o.a + o.b - o.both;
    if (uni == 0) {
        return 1.0;
    }
    return static_cast<double>(o.both) / static_cast<double>(uni);
}

std::vector<PhantomConfig> default_batch(int count, double contrast, double sigma,
                                         std::uint64_t base_seed)
{
    std::vector<PhantomConfig> batch;
    batch.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int i = 0; i < count; ++i) {
        PhantomConfig cfg;
        cfg.seed = base_seed + static_cast<std::uint64_t>(i);
        cfg.noise_sigma = sigma;
        auto& tumor = cfg.tumors.front();
        tumor.mean = std::clamp(cfg.organ_mean + contrast, 0.0, 255.0);

        // Keep the tumor at least `margin` pixels inside the organ outline.
        constexpr double margin = 6.0;
        const double reach_x = cfg.organ.semi_x - tumor.shape.semi_x - margin;
        const double reach_y = cfg.organ.semi_y - tumor.shape.semi_y - margin;
        Xoshiro256 placement(cfg.seed ^ 0xA5A5A5A5A5A5A5A5ULL);
        double u = 0.0;
        double v = 0.0;
        do {
            u = 2.0 * placement.uniform() - 1.0;
            v = 2.0 * placement.uniform() - 1.0;
        } while (u * u + v * v > 1.0);
        tumor.shape.cx = std::round(cfg.organ.cx + u * reach_x);
        tumor.shape.cy = std::round(cfg.organ.cy + v * reach_y);
        batch.push_back(cfg);
    }
    return batch;
}

namespace {

PhantomOutcome evaluate_one(const PhantomConfig& phantom_cfg, const PipelineConfig& cfg)
{
    PhantomOutcome outcome;
    outcome.seed = phantom_cfg.seed;
    try {
        const Phantom phantom = generate_phantom(phantom_cfg);
        const SegmentationResult seg = segment(phantom.image, cfg);
        outcome.regions = num_labels(seg.labels);
        outcome.tumor_label = seg.tumor_label;
        const BinaryImage truth = tumor_mask(phantom.truth);
        const BinaryImage found = seg.tumor_label
                                      ? label_mask(seg.labels, *seg.tumor_label)
                                      : BinaryImage(truth.width(), truth.height(), 0);
        if (seg.tumor_label) {
            outcome.dice = dice(found, truth);
            outcome.jaccard = jaccard(found, truth);
        }
    } catch (const std::exception& e) {
        outcome.error = e.what();
    }
    return outcome;
}

}  // namespace

EvaluationReport evaluate(const std::vector<PhantomConfig>& batch, const PipelineConfig& cfg)
{
    if (batch.empty()) {
        throw PreconditionError("evaluate: empty batch");
    }
    cfg.validate();

    EvaluationReport report;
    report.phantoms.resize(batch.size());
    const std::size_t workers =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, batch.size());
    std::vector<std::future<void>> jobs;
    for (std::size_t wkr = 0; wkr < workers; ++wkr) {
        jobs.push_back(std::async(std::launch::async, [&, wkr] {
            for (std::size_t i = wkr; i < batch.size(); i += workers) {
                report.phantoms[i] = evaluate_one(batch[i], cfg);
            }
        }));
    }
    for (auto& job : jobs) {
        job.get();
    }

    double sum = 0.0;
    report.min_dice = 1.0;
    report.max_dice = 0.0;
    for (const auto& p : report.phantoms) {
        sum += p.dice;
        report.min_dice = std::min(report.min_dice, p.dice);
        report.max_dice = std::max(report.max_dice, p.dice);
    }
    report.mean_dice = sum / static_cast<double>(report.phantoms.size());
    return report;
}

}  // namespace livseg
