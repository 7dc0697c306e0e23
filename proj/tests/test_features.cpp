#include <doctest.h>

#include <random>

#include "livseg/features.hpp"
#include "oracles.hpp"

using namespace livseg;

namespace {

FloatImage random_float(std::mt19937_64& rng, int w, int h)
{
    std::uniform_real_distribution<double> v(-100.0, 100.0);
    FloatImage img(w, h);
    for (auto& p : img.pixels()) {
        p = v(rng);
    }
    return img;
}

double sum_sq(const FloatImage& img)
{
    double s = 0;
    for (const double v : img.pixels()) {
        s += v * v;
    }
    return s;
}

double pyramid_energy(const SubbandPyramid& p)
{
    double s = sum_sq(p.approximation);
    for (const auto& d : p.details) {
        s += sum_sq(d.lh) + sum_sq(d.hl) + sum_sq(d.hh);
    }
    return s;
}

const SubbandFeature& find(const FeatureVector& fv, int level, Band band)
{
    for (const auto& sb : fv.subbands) {
        if (sb.level == level && sb.band == band) {
            return sb;
        }
    }
    throw std::runtime_error("missing subband");
}

}  // namespace

TEST_CASE("filters are orthonormal quadrature mirrors")
{
    for (const auto kind : {WaveletKind::Haar, WaveletKind::Daubechies4}) {
        const auto& h = lowpass_filter(kind);
        const auto g = highpass_filter(kind);
        REQUIRE(h.size() == g.size());
        double hh = 0, gg = 0, hg = 0, sum = 0;
        for (std::size_t k = 0; k < h.size(); ++k) {
            hh += h[k] * h[k];
            gg += g[k] * g[k];
            hg += h[k] * g[k];
            sum += h[k];
        }
        CHECK(hh == doctest::Approx(1.0));
        CHECK(gg == doctest::Approx(1.0));
        CHECK(std::abs(hg) < 1e-12);
        CHECK(sum == doctest::Approx(std::sqrt(2.0)));
    }
    CHECK(band_name(Band::LH) == "LH");
    CHECK(band_name(Band::LL) == "LL");
}

TEST_CASE("haar 2x2 subbands")
{
    const FloatImage img(2, 2, std::vector<double>{1, 2, 3, 4});
    const auto p = dwt2(img, WaveletKind::Haar, 1);
    CHECK(p.approximation[0] == doctest::Approx(5.0));
    CHECK(p.details[0].hl[0] == doctest::Approx(-1.0));
    CHECK(p.details[0].lh[0] == doctest::Approx(-2.0));
    CHECK(std::abs(p.details[0].hh[0]) < 1e-12);
}

TEST_CASE("constant image has no detail energy")
{
    const auto p = dwt2(FloatImage(8, 8, 3.0), WaveletKind::Daubechies4, 2);
    for (const auto& d : p.details) {
        CHECK(sum_sq(d.lh) + sum_sq(d.hl) + sum_sq(d.hh) < 1e-20);
    }
    CHECK(sum_sq(p.approximation) == doctest::Approx(64.0 * 9.0));
}

TEST_CASE("one level matches explicit inner products")
{
    std::mt19937_64 rng(500);
    for (const auto kind : {WaveletKind::Haar, WaveletKind::Daubechies4}) {
        const auto& lo = lowpass_filter(kind);
        const auto hi = highpass_filter(kind);
        for (int i = 0; i < 10; ++i) {
            const auto img = random_float(rng, 16, 16);
            const auto p = dwt2(img, kind, 1);
            CHECK(oracle::max_abs_diff(p.approximation, oracle::subband(img, lo, lo)) < 1e-9);
            CHECK(oracle::max_abs_diff(p.details[0].lh, oracle::subband(img, lo, hi)) < 1e-9);
            CHECK(oracle::max_abs_diff(p.details[0].hl, oracle::subband(img, hi, lo)) < 1e-9);
            CHECK(oracle::max_abs_diff(p.details[0].hh, oracle::subband(img, hi, hi)) < 1e-9);
        }
    }
}

TEST_CASE("perfect reconstruction and Parseval")
{
    std::mt19937_64 rng(501);
    std::uniform_int_distribution<int> d(8, 40);
    for (const auto kind : {WaveletKind::Haar, WaveletKind::Daubechies4}) {
        for (int levels = 1; levels <= 3; ++levels) {
            for (int i = 0; i < 20; ++i) {
                const auto img = random_float(rng, d(rng), d(rng));
                const auto p = dwt2(img, kind, levels);
                CHECK(oracle::max_abs_diff(idwt2(p, kind), img) <= 1e-9);

                const auto even = random_float(rng, 8 * (1 + i % 4), 8 * (1 + i % 3));
                CHECK(pyramid_energy(dwt2(even, kind, levels)) ==
                      doctest::Approx(sum_sq(even)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("odd sizes replicate edges and record level dimensions")
{
    const auto p = dwt2(FloatImage(9, 5, 1.0), WaveletKind::Haar, 2);
    CHECK(p.original_width == 9);
    CHECK(p.details[0].input_width == 9);
    CHECK(p.details[0].input_height == 5);
    CHECK(p.details[0].lh.width() == 5);
    CHECK(p.details[1].input_width == 5);
    CHECK(p.details[1].input_height == 3);
    CHECK(p.approximation.width() == 3);
    CHECK(p.approximation.height() == 2);
}

TEST_CASE("dwt is linear")
{
    std::mt19937_64 rng(502);
    const auto a = random_float(rng, 16, 8);
    const auto b = random_float(rng, 16, 8);
    FloatImage c(16, 8);
    for (std::size_t i = 0; i < c.size(); ++i) {
        c[i] = 2.0 * a[i] - 0.5 * b[i];
    }
    const auto pa = dwt2(a, WaveletKind::Daubechies4, 2);
    const auto pb = dwt2(b, WaveletKind::Daubechies4, 2);
    const auto pc = dwt2(c, WaveletKind::Daubechies4, 2);
    for (std::size_t i = 0; i < pc.approximation.size(); ++i) {
        CHECK(pc.approximation[i] ==
              doctest::Approx(2.0 * pa.approximation[i] - 0.5 * pb.approximation[i]));
    }
    for (std::size_t i = 0; i < pc.details[0].hh.size(); ++i) {
        CHECK(pc.details[0].hh[i] ==
              doctest::Approx(2.0 * pa.details[0].hh[i] - 0.5 * pb.details[0].hh[i]));
    }
}

TEST_CASE("an impulse keeps its energy")
{
    FloatImage img(8, 8, 0.0);
    img(3, 5) = 6.0;
    for (const auto kind : {WaveletKind::Haar, WaveletKind::Daubechies4}) {
        CHECK(pyramid_energy(dwt2(img, kind, 3)) == doctest::Approx(36.0));
    }
}

TEST_CASE("dwt level limits")
{
    CHECK(max_dwt_levels(2, 2) == 1);
    CHECK(max_dwt_levels(8, 8) == 3);
    CHECK(max_dwt_levels(1, 8) == 0);
    try {
        dwt2(FloatImage(4, 4, 0.0), WaveletKind::Haar, 3);
        FAIL("expected precondition error");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find('2') != std::string::npos);
    }
    CHECK_THROWS_AS(dwt2(FloatImage(4, 4, 0.0), WaveletKind::Haar, 0), PreconditionError);
}

TEST_CASE("horizontal stripes concentrate in LH")
{
    GrayImage8 img(16, 16);
    for (int y = 0; y < 16; ++y) {
        for (int x = 0; x < 16; ++x) {
            img(x, y) = y % 2 ? 200 : 40;
        }
    }
    const auto fv = extract_features(img, BinaryImage(16, 16, 1), WaveletKind::Haar, 2);
    CHECK(find(fv, 1, Band::LH).norm_energy > 0.9);
    CHECK(fv.subbands.size() == 7);
    CHECK(fv.subbands.back().band == Band::LL);
    CHECK(fv.mean == doctest::Approx(120.0));
    CHECK(fv.std_dev == doctest::Approx(80.0));
    CHECK(fv.area == 256);
}

TEST_CASE("constant region has zero normalized energies")
{
    const auto fv =
        extract_features(GrayImage8(12, 12, 90), BinaryImage(12, 12, 1), WaveletKind::Haar, 2);
    for (const auto& sb : fv.subbands) {
        CHECK(sb.energy == doctest::Approx(0.0));
        CHECK(sb.norm_energy == 0.0);
        CHECK(sb.log_energy == doctest::Approx(std::log1p(sb.energy)));
    }
    CHECK(fv.std_dev == 0.0);
}

TEST_CASE("features do not depend on region position")
{
    std::mt19937_64 rng(503);
    const auto patch = oracle::random_gray(rng, 12, 10);
    GrayImage8 a(40, 40, 0), b(40, 40, 0);
    BinaryImage ma(40, 40, 0), mb(40, 40, 0);
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 12; ++x) {
            a(x + 3, y + 5) = patch(x, y);
            b(x + 20, y + 27) = patch(x, y);
            ma(x + 3, y + 5) = (x + y) % 5 != 0;
            mb(x + 20, y + 27) = (x + y) % 5 != 0;
        }
    }
    const auto fa = extract_features(a, ma, WaveletKind::Daubechies4, 2);
    const auto fb = extract_features(b, mb, WaveletKind::Daubechies4, 2);
    REQUIRE(fa.subbands.size() == fb.subbands.size());
    for (std::size_t i = 0; i < fa.subbands.size(); ++i) {
        CHECK(fa.subbands[i].energy == doctest::Approx(fb.subbands[i].energy));
    }
    CHECK(fa.mean == doctest::Approx(fb.mean));
}

TEST_CASE("feature extraction errors")
{
    CHECK_THROWS_AS(extract_features(GrayImage8(8, 8, 0), BinaryImage(8, 8, 0),
                                     WaveletKind::Haar, 1),
                    PreconditionError);
    BinaryImage tiny(8, 8, 0);
    tiny(2, 2) = 1;
    tiny(3, 3) = 1;
    CHECK_THROWS_AS(extract_features(GrayImage8(8, 8, 0), tiny, WaveletKind::Haar, 2),
                    PreconditionError);
    CHECK_THROWS_AS(extract_features(GrayImage8(8, 8, 0), BinaryImage(7, 8, 1),
                                     WaveletKind::Haar, 1),
                    PreconditionError);
}

TEST_CASE("haar details vanish below the block scale of a blocky image")
{
    std::mt19937_64 rng(504);
    std::uniform_real_distribution<double> v(0.0, 255.0);
    const int levels = 3;
    const int block = 1 << levels;
    FloatImage img(4 * block, 3 * block);
    for (int by = 0; by < 3; ++by) {
        for (int bx = 0; bx < 4; ++bx) {
            const double value = v(rng);
            for (int y = 0; y < block; ++y) {
                for (int x = 0; x < block; ++x) {
                    img(bx * block + x, by * block + y) = value;
                }
            }
        }
    }
    const auto p = dwt2(img, WaveletKind::Haar, levels);
    for (int k = 0; k < levels; ++k) {
        const auto& d = p.details[static_cast<std::size_t>(k)];
        CHECK(sum_sq(d.lh) + sum_sq(d.hl) + sum_sq(d.hh) < 1e-18);
    }
}
