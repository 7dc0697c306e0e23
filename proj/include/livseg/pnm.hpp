#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "livseg/image.hpp"

namespace livseg {

enum class PnmErrorKind { MalformedHeader, MaxvalTooLarge, TruncatedPayload, BadSample };

/// Netpbm parse failure; `offset()` is the byte position where parsing stopped.
class PnmParseError : public std::runtime_error {
public:
    PnmParseError(PnmErrorKind kind, std::size_t offset, const std::string& what);

    PnmErrorKind kind() const noexcept { return kind_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    PnmErrorKind kind_;
    std::size_t offset_;
};

/// Reads binary (P5) or ASCII (P2) graymaps with maxval <= 255. Samples are
/// returned as stored; no maxval rescaling is applied.
GrayImage8 read_pgm(std::span<const std::uint8_t> bytes);

/// Always emits P5 with the header "P5\n<w> <h>\n255\n".
std::vector<std::uint8_t> write_pgm(const GrayImage8& img);

/// P6, maxval 255, interleaved RGB.
std::vector<std::uint8_t> write_ppm(const RgbImage& img);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

GrayImage8 load_pgm(const std::filesystem::path& path);

}  // namespace livseg
