#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "livseg/image.hpp"
#include "livseg/watershed.hpp"

namespace livseg {

/// xoshiro256** seeded through splitmix64. Streams are fixed by the
/// published algorithms, so any port reproduces them bit for bit.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed);

    std::uint64_t next() noexcept;
    /// Uniform in [0, 1) with 53 random bits.
    double uniform() noexcept;
    /// Standard normal via Box-Muller; both outputs of a pair are used.
    double gaussian() noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
    std::optional<double> spare_;
};

struct Ellipse {
    double cx = 0.0;
    double cy = 0.0;
    double semi_x = 1.0;
    double semi_y = 1.0;
    /// Rotation in radians.
    double angle = 0.0;

    bool contains(double x, double y) const noexcept;
};

struct TumorSpec {
    Ellipse shape;
    double mean = 160.0;
};

struct PhantomConfig {
    int width = 256;
    int height = 256;
    Ellipse organ{128.0, 128.0, 90.0, 60.0, 0.0};
    double organ_mean = 120.0;
    double background_mean = 30.0;
    std::vector<TumorSpec> tumors{TumorSpec{Ellipse{150.0, 120.0, 14.0, 10.0, 0.0}, 160.0}};
    double noise_sigma = 8.0;
    std::uint64_t seed = 1;

    /// Geometry and intensity checks; throws PreconditionError.
    void validate() const;
};

struct Phantom {
    GrayImage8 image;
    /// 0 = background, 1 = organ, 2.. = tumors (noise free).
    LabelImage truth;
};

Phantom generate_phantom(const PhantomConfig& cfg);

/// Union of all tumor labels in a ground-truth map.
BinaryImage tumor_mask(const LabelImage& truth);

/// 2|A and B| / (|A| + |B|); 1 when both are empty.
double dice(const BinaryImage& a, const BinaryImage& b);
/// |A and B| / |A or B|; 1 when both are empty.
double jaccard(const BinaryImage& a, const BinaryImage& b);

/// `count` default-geometry phantoms with tumor mean organ_mean + contrast.
/// Phantom i uses seed base_seed + i, which also places its tumor.
std::vector<PhantomConfig> default_batch(int count, double contrast, double sigma,
                                         std::uint64_t base_seed);

struct PhantomOutcome {
    std::uint64_t seed = 0;
    double dice = 0.0;
    double jaccard = 0.0;
    int regions = 0;
    std::optional<int> tumor_label;
    std::optional<std::string> error;
};

struct EvaluationReport {
    std::vector<PhantomOutcome> phantoms;
    double mean_dice = 0.0;
    double min_dice = 0.0;
    double max_dice = 0.0;
};

/// Segments every phantom and scores the selected tumor region. Failed
/// entries keep their error message and score 0. Entries may be processed
/// concurrently; the report follows batch order.
EvaluationReport evaluate(const std::vector<PhantomConfig>& batch, const PipelineConfig& cfg);

}  // namespace livseg
