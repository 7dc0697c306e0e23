#include <doctest.h>

#include <random>
#include <string>

#include "livseg/image.hpp"
#include "livseg/pnm.hpp"
#include "oracles.hpp"

using namespace livseg;

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s)
{
    return {s.begin(), s.end()};
}

}  // namespace

TEST_CASE("raster rejects mismatched data and empty dimensions")
{
    CHECK_THROWS_AS(GrayImage8(2, 2, std::vector<std::uint8_t>{1, 2, 3}), PreconditionError);
    CHECK_THROWS_AS(GrayImage8(0, 3), PreconditionError);
}

TEST_CASE("read_pgm binary and ascii")
{
    auto p5 = bytes_of("P5\n2 2\n255\n");
    p5.insert(p5.end(), {0, 85, 170, 255});
    const auto img = read_pgm(p5);
    CHECK(img.width() == 2);
    CHECK(img.height() == 2);
    CHECK(img.data() == std::vector<std::uint8_t>{0, 85, 170, 255});

    const auto one = read_pgm(bytes_of("P2\n1 1\n255\n7\n"));
    CHECK(one.size() == 1);
    CHECK(one[0] == 7);
}

TEST_CASE("read_pgm accepts comments between header tokens")
{
    auto p5 = bytes_of("P5\n# made by hand\n3 # width\n1\n# max\n200\n");
    p5.insert(p5.end(), {1, 2, 3});
    const auto img = read_pgm(p5);
    CHECK(img.width() == 3);
    CHECK(img.data() == std::vector<std::uint8_t>{1, 2, 3});
}

TEST_CASE("read_pgm errors carry kind and offset")
{
    auto truncated = bytes_of("P5\n2 2\n255\n");
    truncated.insert(truncated.end(), {1, 2, 3});
    try {
        read_pgm(truncated);
        FAIL("expected truncation error");
    } catch (const PnmParseError& e) {
        CHECK(e.kind() == PnmErrorKind::TruncatedPayload);
        CHECK(e.offset() == truncated.size());
        CHECK(std::string(e.what()).find("offset") != std::string::npos);
    }

    try {
        read_pgm(bytes_of("P5\n2 2\n65535\n"));
        FAIL("expected maxval error");
    } catch (const PnmParseError& e) {
        CHECK(e.kind() == PnmErrorKind::MaxvalTooLarge);
        CHECK(e.offset() == 7);
    }

    try {
        read_pgm(bytes_of("P5\n2 x\n255\n"));
        FAIL("expected header error");
    } catch (const PnmParseError& e) {
        CHECK(e.kind() == PnmErrorKind::MalformedHeader);
        CHECK(e.offset() == 5);
    }

    CHECK_THROWS_AS(read_pgm(bytes_of("P6\n1 1\n255\n")), PnmParseError);
    CHECK_THROWS_AS(read_pgm(bytes_of("P2\n2 1\n255\n7\n")), PnmParseError);
    CHECK_THROWS_AS(read_pgm(bytes_of("P2\n1 1\n100\n101\n")), PnmParseError);
}

TEST_CASE("write_pgm header layout")
{
    const auto one = write_pgm(GrayImage8(1, 1, std::vector<std::uint8_t>{42}));
    auto expected = bytes_of("P5\n1 1\n255\n");
    expected.push_back(42);
    CHECK(one == expected);

    const auto wide = write_pgm(GrayImage8(2, 3, 0));
    CHECK(std::string(wide.begin(), wide.begin() + 7) == "P5\n2 3\n");
}

TEST_CASE("pgm round trip on random images")
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> dim(1, 40);
    for (int i = 0; i < 100; ++i) {
        const auto img = oracle::random_gray(rng, dim(rng), dim(rng));
        CHECK(read_pgm(write_pgm(img)) == img);
    }
}

TEST_CASE("write_ppm")
{
    const auto red = write_ppm(RgbImage(1, 1, std::vector<Rgb>{{255, 0, 0}}));
    auto expected = bytes_of("P6\n1 1\n255\n");
    expected.insert(expected.end(), {255, 0, 0});
    CHECK(red == expected);

    const auto four = write_ppm(RgbImage(2, 2));
    CHECK(four.size() == std::string("P6\n2 2\n255\n").size() + 12);

    // Gray-replicated triples carry the same samples as the graymap.
    const GrayImage8 gray(2, 1, std::vector<std::uint8_t>{10, 200});
    const auto ppm = write_ppm(gray_to_rgb(gray));
    const auto header = std::string("P6\n2 1\n255\n").size();
    CHECK(ppm[header] == 10);
    CHECK(ppm[header + 2] == 10);
    CHECK(ppm[header + 3] == 200);
}

TEST_CASE("float conversions")
{
    const GrayImage8 g(2, 1, std::vector<std::uint8_t>{0, 255});
    const auto f = to_float(g);
    CHECK(f[0] == 0.0);
    CHECK(f[1] == 255.0);
    CHECK(to_u8(f) == g);
    CHECK(to_float(GrayImage8(3, 3, 7)) == FloatImage(3, 3, 7.0));

    const FloatImage mixed(4, 1, std::vector<double>{-3.0, 0.4, 254.6, 999.0});
    CHECK(to_u8(mixed).data() == std::vector<std::uint8_t>{0, 0, 255, 255});
    CHECK(to_u8(FloatImage(1, 1, 127.5))[0] == 128);
    CHECK(to_u8(FloatImage(1, 1, 13.0))[0] == 13);

    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
        const auto img = oracle::random_gray(rng, 9, 5);
        CHECK(to_u8(to_float(img)) == img);
    }
}

TEST_CASE("rescale_to_u8")
{
    CHECK(rescale_to_u8(FloatImage(2, 1, std::vector<double>{0.0, 1020.0})).data() ==
          std::vector<std::uint8_t>{0, 255});
    CHECK(rescale_to_u8(FloatImage(3, 3, 4.5)) == GrayImage8(3, 3, 0));
    CHECK(rescale_to_u8(FloatImage(3, 1, std::vector<double>{0, 510, 1020})).data() ==
          std::vector<std::uint8_t>{0, 128, 255});

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> val(-50.0, 50.0);
    for (int i = 0; i < 50; ++i) {
        FloatImage f(6, 4);
        for (auto& v : f.pixels()) {
            v = val(rng);
        }
        const auto out = rescale_to_u8(f);
        const auto [lo, hi] = std::minmax_element(out.pixels().begin(), out.pixels().end());
        CHECK(*lo == 0);
        CHECK(*hi == 255);
    }
}

TEST_CASE("label helpers")
{
    const LabelImage good(3, 1, std::vector<std::int32_t>{0, 2, 1});
    CHECK(num_labels(good) == 2);
    CHECK(labels_contiguous(good));
    const LabelImage gap(3, 1, std::vector<std::int32_t>{0, 3, 1});
    CHECK_FALSE(labels_contiguous(gap));
}
