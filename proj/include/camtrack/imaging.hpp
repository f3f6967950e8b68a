#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "camtrack/error.hpp"
#include "camtrack/geometry.hpp"

namespace camtrack {

struct RgbFormat {
    static constexpr int bytes_per_pixel = 3;
    static constexpr std::string_view name = "RGB";
};
struct HsvFormat {
    static constexpr int bytes_per_pixel = 3;
    static constexpr std::string_view name = "HSV";
};
/// Interleaved Y0 Cb Y1 Cr, two pixels per 4-byte group.
struct Ycbcr422Format {
    static constexpr int bytes_per_pixel = 2;
    static constexpr std::string_view name = "YCbCr 4:2:2";
};

/// Packed 8-bit interleaved frame. The format tag fixes the channel layout so
/// an RGB frame cannot be handed to code that expects HSV.
template <typename Format>
class Frame {
public:
    static constexpr int bytes_per_pixel = Format::bytes_per_pixel;

    Frame() = default;
    Frame(int width, int height)
        : Frame(width, height,
                std::vector<std::uint8_t>(checked_size(width, height), std::uint8_t{0})) {}
    Frame(int width, int height, std::vector<std::uint8_t> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (data_.size() != checked_size(width, height)) {
            throw Error(ErrorKind::malformed_frame,
                        std::string(Format::name) + " frame: data length " +
                            std::to_string(data_.size()) + " does not match " +
                            std::to_string(width) + "x" + std::to_string(height));
        }
    }

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }
    [[nodiscard]] std::span<const std::uint8_t> data() const noexcept { return data_; }
    [[nodiscard]] std::span<std::uint8_t> data() noexcept { return data_; }

    [[nodiscard]] std::span<const std::uint8_t> row(int y) const noexcept {
        return std::span(data_).subspan(offset(0, y), std::size_t(width_) * bytes_per_pixel);
    }
    [[nodiscard]] std::span<std::uint8_t> row(int y) noexcept {
        return std::span(data_).subspan(offset(0, y), std::size_t(width_) * bytes_per_pixel);
    }
    [[nodiscard]] std::array<std::uint8_t, bytes_per_pixel> pixel(int x, int y) const noexcept {
        std::array<std::uint8_t, bytes_per_pixel> p{};
        for (int c = 0; c < bytes_per_pixel; ++c) p[c] = data_[offset(x, y) + c];
        return p;
    }
    void set_pixel(int x, int y, std::array<std::uint8_t, bytes_per_pixel> p) noexcept {
        for (int c = 0; c < bytes_per_pixel; ++c) data_[offset(x, y) + c] = p[c];
    }

    friend bool operator==(const Frame&, const Frame&) = default;

private:
    static std::size_t checked_size(int width, int height) {
        if (width <= 0 || height <= 0) {
            throw Error(ErrorKind::malformed_frame, std::string(Format::name) +
                                                        " frame: nonpositive size " +
                                                        std::to_string(width) + "x" +
                                                        std::to_string(height));
        }
        if constexpr (std::is_same_v<Format, Ycbcr422Format>) {
            if (width % 2 != 0) {
                throw Error(ErrorKind::malformed_frame,
                            "YCbCr 4:2:2 frame: width " + std::to_string(width) + " is odd");
            }
        }
        return std::size_t(width) * std::size_t(height) * bytes_per_pixel;
    }
    [[nodiscard]] std::size_t offset(int x, int y) const noexcept {
        return (std::size_t(y) * std::size_t(width_) + std::size_t(x)) * bytes_per_pixel;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

using RgbFrame = Frame<RgbFormat>;
using HsvFrame = Frame<HsvFormat>;
using Ycbcr422Frame = Frame<Ycbcr422Format>;

using Rgb = std::array<std::uint8_t, 3>;
using Hsv = std::array<std::uint8_t, 3>;

enum class ColorMatrix { bt601_limited, bt709_limited };

[[nodiscard]] std::optional<ColorMatrix> parse_color_matrix(std::string_view s);
[[nodiscard]] std::string_view to_string(ColorMatrix m);

/// Converts one limited-range sample triple with 16-bit fixed-point
/// coefficients. Bit-exact on every platform.
[[nodiscard]] Rgb ycbcr_to_rgb_pixel(std::uint8_t y, std::uint8_t cb, std::uint8_t cr,
                                     ColorMatrix matrix) noexcept;

/// Chroma is upsampled by replicating each Cb/Cr pair across both pixels.
[[nodiscard]] RgbFrame ycbcr422_to_rgb(const Ycbcr422Frame& src,
                                       ColorMatrix matrix = ColorMatrix::bt709_limited);

/// H = floor(256 * hue / 360) mod 256, S = floor(255 * (max - min) / max), V = max.
/// Achromatic pixels get H = 0.
[[nodiscard]] Hsv rgb_to_hsv_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;
[[nodiscard]] HsvFrame rgb_to_hsv(const RgbFrame& src);

// ---------------------------------------------------------------------------
// Sequences

enum class SequenceKind { numbered_images, raw_ycbcr };

[[nodiscard]] std::optional<SequenceKind> parse_sequence_kind(std::string_view s);

struct FrameSource {
    std::filesystem::path path;
    std::uintmax_t byte_offset = 0;  // raw_ycbcr only
};

/// An ordered list of frame sources sharing one resolution. Pixels are decoded
/// on demand by read_rgb().
class Sequence {
public:
    Sequence(SequenceKind kind, std::vector<FrameSource> frames, int width, int height,
             std::optional<double> fps_hint = std::nullopt);

    [[nodiscard]] SequenceKind kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t size() const noexcept { return frames_.size(); }
    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] const std::vector<FrameSource>& frames() const noexcept { return frames_; }
    [[nodiscard]] std::optional<double> fps_hint() const noexcept { return fps_hint_; }

    [[nodiscard]] RgbFrame read_rgb(std::size_t index,
                                    ColorMatrix matrix = ColorMatrix::bt709_limited) const;
    [[nodiscard]] HsvFrame read_hsv(std::size_t index,
                                    ColorMatrix matrix = ColorMatrix::bt709_limited) const;

private:
    SequenceKind kind_;
    std::vector<FrameSource> frames_;
    int width_;
    int height_;
    std::optional<double> fps_hint_;
};

struct RawGeometry {
    int width = 0;
    int height = 0;
};

/// numbered_images: every .ppm/.pnm/.png file in the directory, ordered by the
/// last run of digits in the file name. raw_ycbcr: one file of back-to-back
/// interleaved 4:2:2 frames whose size comes from `raw`.
[[nodiscard]] Sequence load_sequence(const std::filesystem::path& path, SequenceKind kind,
                                     std::optional<RawGeometry> raw = std::nullopt);

// ---------------------------------------------------------------------------
// Image files

struct ImageSize {
    int width = 0;
    int height = 0;
};

[[nodiscard]] ImageSize read_image_size(const std::filesystem::path& path);
[[nodiscard]] RgbFrame read_image(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const RgbFrame& frame);
[[nodiscard]] Ycbcr422Frame read_raw_ycbcr_frame(const std::filesystem::path& path,
                                                 std::uintmax_t byte_offset, int width,
                                                 int height);

}  // namespace camtrack
