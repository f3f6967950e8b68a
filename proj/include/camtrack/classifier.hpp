#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "camtrack/geometry.hpp"
#include "camtrack/imaging.hpp"

namespace camtrack {

/// Per-channel mean of the target region in the previous frame.
struct HsvMean {
    std::uint8_t h = 0;
    std::uint8_t s = 0;
    std::uint8_t v = 0;

    friend bool operator==(const HsvMean&, const HsvMean&) = default;
};

/// Weight in Q0.8: 256 is one.
struct Q8Weight {
    std::uint16_t raw = 0;

    [[nodiscard]] static Q8Weight from_double(double w);
    [[nodiscard]] double to_double() const noexcept { return raw / 256.0; }
    friend bool operator==(const Q8Weight&, const Q8Weight&) = default;
};

/// Thresholds are strict upper bounds on the distance to the mean. The
/// weighted test compares alpha*dH + beta*dS + gamma*dV against a_t.
struct ClassifierParams {
    int h_t = 16;
    int s_t = 48;
    int v_t = 48;
    int a_t = 32;
    Q8Weight alpha{128};
    Q8Weight beta{64};
    Q8Weight gamma{64};

    /// Throws invalid_parameter unless thresholds are positive and the
    /// weights sum to one within one Q0.8 ulp.
    void validate() const;
};

/// One bit per pixel, row-major. Rows are padded to whole 64-bit words so that
/// rows can be written concurrently.
class BinaryMask {
public:
    BinaryMask() = default;
    BinaryMask(int width, int height);

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] std::size_t words_per_row() const noexcept { return stride_; }

    [[nodiscard]] bool get(int x, int y) const noexcept {
        return (words_[std::size_t(y) * stride_ + std::size_t(x >> 6)] >> (x & 63)) & 1u;
    }
    void set(int x, int y, bool v) noexcept {
        auto& w = words_[std::size_t(y) * stride_ + std::size_t(x >> 6)];
        const std::uint64_t bit = std::uint64_t{1} << (x & 63);
        w = v ? (w | bit) : (w & ~bit);
    }
    [[nodiscard]] std::span<const std::uint64_t> row_words(int y) const noexcept {
        return std::span(words_).subspan(std::size_t(y) * stride_, stride_);
    }
    [[nodiscard]] std::span<std::uint64_t> row_words(int y) noexcept {
        return std::span(words_).subspan(std::size_t(y) * stride_, stride_);
    }

    [[nodiscard]] std::uint64_t popcount() const noexcept;
    [[nodiscard]] std::uint64_t popcount(const Rect& r) const noexcept;

    friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::size_t stride_ = 0;
    std::vector<std::uint64_t> words_;
};

/// min(|h1 - h2|, 256 - |h1 - h2|)
[[nodiscard]] constexpr int hue_distance(std::uint8_t h1, std::uint8_t h2) noexcept {
    const int d = h1 > h2 ? h1 - h2 : h2 - h1;
    return d > 128 ? 256 - d : d;
}

[[nodiscard]] bool classify_pixel(const Hsv& pixel, const HsvMean& mean,
                                  const ClassifierParams& params) noexcept;

/// Rows are split across `workers` threads; the result does not depend on the
/// split.
[[nodiscard]] BinaryMask classify_frame(const HsvFrame& frame, const HsvMean& mean,
                                        const ClassifierParams& params, int workers = 1);

/// Rounded per-channel mean over box ∩ frame. Throws empty_region when they do
/// not intersect.
[[nodiscard]] HsvMean compute_hsv_mean(const HsvFrame& frame, const Rect& box);

/// Mean over the pixels of box ∩ frame that are set in `mask`; falls back to
/// every pixel of the box when none are set.
[[nodiscard]] HsvMean compute_hsv_mean(const HsvFrame& frame, const Rect& box,
                                       const BinaryMask& mask);

/// Writes the mask as a binary portable bitmap (P4). Set bits are black.
void write_pbm(const std::filesystem::path& path, const BinaryMask& mask);

}  // namespace camtrack
