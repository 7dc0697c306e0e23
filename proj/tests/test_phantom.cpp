#include <doctest.h>

#include <cmath>
#include <numbers>

#include "livseg/phantom.hpp"

using namespace livseg;

TEST_CASE("xoshiro256** stream for seed 1")
{
    // Reference values from a separate splitmix64 + xoshiro256** script.
    Xoshiro256 rng(1);
    CHECK(rng.next() == 0xb3f2af6d0fc710c5ULL);
    CHECK(rng.next() == 0x853b559647364ceaULL);
    CHECK(rng.next() == 0x92f89756082a4514ULL);
}

TEST_CASE("uniform and gaussian moments")
{
    Xoshiro256 rng(9);
    double su = 0, sg = 0, sg2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        su += u;
        const double g = rng.gaussian();
        sg += g;
        sg2 += g * g;
    }
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::abs(sg / n) < 0.01);
    CHECK(sg2 / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("ellipse membership")
{
    const Ellipse e{10, 10, 4, 2, 0};
    CHECK(e.contains(14, 10));
    CHECK_FALSE(e.contains(10, 13));
    const Ellipse r{10, 10, 4, 2, std::numbers::pi / 2};
    CHECK(r.contains(10, 14));
    CHECK_FALSE(r.contains(14, 10));
}

TEST_CASE("noiseless phantom has exact class intensities")
{
    PhantomConfig cfg;
    cfg.noise_sigma = 0.0;
    const auto ph = generate_phantom(cfg);
    for (std::size_t i = 0; i < ph.image.size(); ++i) {
        const int want = ph.truth[i] == 0 ? 30 : (ph.truth[i] == 1 ? 120 : 160);
        REQUIRE(ph.image[i] == want);
    }
    CHECK(ph.truth(128, 128) == 1);
    CHECK(ph.truth(150, 120) == 2);
    CHECK(ph.truth(0, 0) == 0);
}

TEST_CASE("phantom generation is deterministic per seed")
{
    PhantomConfig cfg;
    cfg.seed = 12;
    const auto a = generate_phantom(cfg);
    const auto b = generate_phantom(cfg);
    CHECK(a.image == b.image);
    CHECK(a.truth == b.truth);
    cfg.seed = 13;
    CHECK(generate_phantom(cfg).image != a.image);
    CHECK(generate_phantom(cfg).truth == a.truth);
}

TEST_CASE("tumor area is close to the ellipse area")
{
    const auto ph = generate_phantom(PhantomConfig{});
    const double a = 14, b = 10;
    const double area = std::numbers::pi * a * b;
    const double perimeter = std::numbers::pi * (3 * (a + b) - std::sqrt((3 * a + b) * (a + 3 * b)));
    const auto n = static_cast<double>(count_foreground(tumor_mask(ph.truth)));
    CHECK(std::abs(n - area) <= perimeter);
}

TEST_CASE("phantom validation")
{
    PhantomConfig cfg;
    cfg.tumors.push_back(TumorSpec{Ellipse{155, 120, 10, 8, 0}, 170});
    CHECK_THROWS_AS(generate_phantom(cfg), PreconditionError);

    cfg = {};
    cfg.tumors.front().shape.cx = 215;
    CHECK_THROWS_AS(cfg.validate(), PreconditionError);

    cfg = {};
    cfg.tumors.front().mean = cfg.organ_mean;
    CHECK_THROWS_AS(cfg.validate(), PreconditionError);

    cfg = {};
    cfg.organ.semi_x = 200;
    CHECK_THROWS_AS(cfg.validate(), PreconditionError);

    cfg = {};
    cfg.noise_sigma = -1;
    CHECK_THROWS_AS(cfg.validate(), PreconditionError);
}

TEST_CASE("dice and jaccard")
{
    const BinaryImage a(4, 1, std::vector<std::uint8_t>{1, 1, 0, 0});
    const BinaryImage b(4, 1, std::vector<std::uint8_t>{0, 1, 1, 0});
    CHECK(dice(a, b) == doctest::Approx(0.5));
    CHECK(jaccard(a, b) == doctest::Approx(1.0 / 3.0));
    CHECK(dice(a, a) == 1.0);
    CHECK(jaccard(a, a) == 1.0);
    const BinaryImage none(4, 1, 0);
    CHECK(dice(none, none) == 1.0);
    CHECK(dice(a, none) == 0.0);
    // J = D / (2 - D)
    CHECK(jaccard(a, b) == doctest::Approx(dice(a, b) / (2.0 - dice(a, b))));
}

TEST_CASE("default batch keeps tumors inside the organ")
{
    const auto batch = default_batch(30, 40.0, 8.0, 100);
    REQUIRE(batch.size() == 30);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        CHECK(batch[i].seed == 100 + i);
        CHECK(batch[i].tumors.front().mean == 160.0);
        CHECK_NOTHROW(batch[i].validate());
    }
    CHECK(default_batch(3, 40.0, 8.0, 100)[2].tumors.front().shape.cx ==
          batch[2].tumors.front().shape.cx);
}

TEST_CASE("evaluate is deterministic and ordered")
{
    const auto batch = default_batch(4, 40.0, 8.0, 1);
    const auto a = evaluate(batch, PipelineConfig{});
    const auto b = evaluate(batch, PipelineConfig{});
    REQUIRE(a.phantoms.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(a.phantoms[i].seed == batch[i].seed);
        CHECK(a.phantoms[i].dice == b.phantoms[i].dice);
        CHECK_FALSE(a.phantoms[i].error.has_value());
    }
    CHECK(a.min_dice <= a.mean_dice);
    CHECK(a.mean_dice <= a.max_dice);
}

TEST_CASE("evaluate scores failures as zero")
{
    auto batch = default_batch(2, 40.0, 8.0, 1);
    batch[1].tumors.front().mean = batch[1].organ_mean;
    const auto r = evaluate(batch, PipelineConfig{});
    CHECK(r.phantoms[1].error.has_value());
    CHECK(r.phantoms[1].dice == 0.0);
    CHECK(r.min_dice == 0.0);
    CHECK(r.mean_dice == doctest::Approx(r.phantoms[0].dice / 2.0));
}

TEST_CASE("dice falls as noise grows")
{
    double previous = 2.0;
    for (const double sigma : {0.0, 8.0, 24.0}) {
        const auto r = evaluate(default_batch(20, 40.0, sigma, 1), PipelineConfig{});
        CHECK(r.mean_dice <= previous + 0.01);
        previous = r.mean_dice;
    }
}
