#include "livseg/pnm.hpp"

#include <fstream>
#include <iterator>
#include <system_error>

namespace livseg {

PnmParseError::PnmParseError(PnmErrorKind kind, std::size_t offset, const std::string& what)
    : std::runtime_error(what + " at byte offset " + std::to_string(offset)),
      kind_(kind),
      offset_(offset)
{
}

namespace {

bool is_space(std::uint8_t c)
{
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

class HeaderReader {
public:
    HeaderReader(std::span<const std::uint8_t> bytes, std::size_t pos) : bytes_(bytes), pos_(pos)
    {
    }

    std::size_t pos() const noexcept { return pos_; }
    /// Offset of the most recently read token.
    std::size_t token_start() const noexcept { return token_start_; }

    // Skips whitespace and '#' comments (a comment runs to end of line).
    void skip_separators()
    {
        while (pos_ < bytes_.size()) {
            if (is_space(bytes_[pos_])) {
                ++pos_;
            } else if (bytes_[pos_] == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
                    ++pos_;
                }
            } else {
                break;
            }
        }
    }

    unsigned long read_uint(PnmErrorKind kind, const char* what)
    {
        skip_separators();
        const std::size_t start = pos_;
        token_start_ = start;
        unsigned long value = 0;
        while (pos_ < bytes_.size() && bytes_[pos_] >= '0' && bytes_[pos_] <= '9') {
            value = value * 10 + (bytes_[pos_] - '0');
            if (value > 0xFFFFFFFFUL) {
                throw PnmParseError(kind, start, std::string("oversized ") + what);
            }
            ++pos_;
        }
        if (pos_ == start) {
            throw PnmParseError(kind, start, std::string("expected ") + what);
        }
        return value;
    }

    // Exactly one whitespace byte separates maxval from a binary payload.
    void expect_single_space()
    {
        if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
            throw PnmParseError(PnmErrorKind::MalformedHeader, pos_,
                                "expected whitespace after maxval");
        }
        ++pos_;
    }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
    std::size_t token_start_ = 0;
};

void append_header(std::vector<std::uint8_t>& out, const char* magic, int w, int h)
{
    const std::string header =
        std::string(magic) + "\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    out.insert(out.end(), header.begin(), header.end());
}

}  // namespace

GrayImage8 read_pgm(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
        throw PnmParseError(PnmErrorKind::MalformedHeader, 0, "missing P5/P2 magic");
    }
    const bool ascii = bytes[1] == '2';

    if (bytes.size() > 2 && !is_space(bytes[2]) && bytes[2] != '#') {
        throw PnmParseError(PnmErrorKind::MalformedHeader, 2, "expected whitespace after magic");
    }
    HeaderReader tokens(bytes, 2);
    const auto width = tokens.read_uint(PnmErrorKind::MalformedHeader, "width");
    const std::size_t dims_offset = tokens.token_start();
    const auto height = tokens.read_uint(PnmErrorKind::MalformedHeader, "height");
    const auto maxval = tokens.read_uint(PnmErrorKind::MalformedHeader, "maxval");
    const std::size_t maxval_offset = tokens.token_start();
    if (width == 0 || height == 0 || width > 1u << 15 || height > 1u << 15) {
        throw PnmParseError(PnmErrorKind::MalformedHeader, dims_offset,
                            "unsupported dimensions " + std::to_string(width) + "x" +
                                std::to_string(height));
    }
    if (maxval == 0) {
        throw PnmParseError(PnmErrorKind::MalformedHeader, maxval_offset, "maxval must be positive");
    }
    if (maxval > 255) {
        throw PnmParseError(PnmErrorKind::MaxvalTooLarge, maxval_offset,
                            "maxval " + std::to_string(maxval) + " exceeds 255");
    }

    const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    std::vector<std::uint8_t> data(count);

    if (!ascii) {
        tokens.expect_single_space();
        const std::size_t payload = tokens.pos();
        if (bytes.size() - payload < count) {
            throw PnmParseError(PnmErrorKind::TruncatedPayload, bytes.size(),
                                "payload has " + std::to_string(bytes.size() - payload) +
                                    " bytes, expected " + std::to_string(count));
        }
        std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(payload), count, data.begin());
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            tokens.skip_separators();
            const std::size_t at = tokens.pos();
            if (at >= bytes.size()) {
                throw PnmParseError(PnmErrorKind::TruncatedPayload, at,
                                    "payload has " + std::to_string(i) + " samples, expected " +
                                        std::to_string(count));
            }
            const auto v = tokens.read_uint(PnmErrorKind::BadSample, "sample");
            if (v > maxval) {
                throw PnmParseError(PnmErrorKind::BadSample, at,
                                    "sample " + std::to_string(v) + " exceeds maxval");
            }
            data[i] = static_cast<std::uint8_t>(v);
        }
    }
    return GrayImage8(static_cast<int>(width), static_cast<int>(height), std::move(data));
}

std::vector<std::uint8_t> write_pgm(const GrayImage8& img)
{
    std::vector<std::uint8_t> out;
    append_header(out, "P5", img.width(), img.height());
    out.insert(out.end(), img.pixels().begin(), img.pixels().end());
    return out;
}

std::vector<std::uint8_t> write_ppm(const RgbImage& img)
{
    std::vector<std::uint8_t> out;
    append_header(out, "P6", img.width(), img.height());
    out.reserve(out.size() + img.size() * 3);
    for (const auto& px : img.pixels()) {
        out.push_back(px.r);
        out.push_back(px.g);
        out.push_back(px.b);
    }
    return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            throw std::runtime_error("short write to " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw std::runtime_error("cannot rename " + tmp.string() + ": " + ec.message());
    }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text)
{
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

GrayImage8 load_pgm(const std::filesystem::path& path)
{
    const auto bytes = read_file(path);
    return read_pgm(bytes);
}

}  // namespace livseg
