#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

#include "camtrack/classifier.hpp"
#include "camtrack/geometry.hpp"

namespace camtrack {

/// Kernel-weighted zeroth and first moments of a binary mask. Weights are
/// Q8.8 (256 is one), so m00 / 256 is an area in pixels.
struct Moments {
    std::uint64_t m00 = 0;
    std::uint64_t m10 = 0;
    std::uint64_t m01 = 0;

    Moments& operator+=(const Moments& o) noexcept {
        m00 += o.m00;
        m10 += o.m10;
        m01 += o.m01;
        return *this;
    }
    friend Moments operator+(Moments a, const Moments& b) noexcept { return a += b; }
    friend bool operator==(const Moments&, const Moments&) = default;
};

enum class KernelShape {
    linear,        // 1 - d/R
    epanechnikov,  // 1 - d^2/R^2
    uniform,       // 1 everywhere
};

[[nodiscard]] std::optional<KernelShape> parse_kernel_shape(std::string_view s);
[[nodiscard]] std::string_view to_string(KernelShape k);

inline constexpr int kWeightOne = 256;

/// Radial weight around `center` (pixel-index coordinates) with support
/// `radius`. An infinite radius gives unit weight everywhere.
struct WeightKernel {
    Point2d center;
    double radius = std::numeric_limits<double>::infinity();
    KernelShape shape = KernelShape::linear;
};

/// round(256 * max(0, 1 - d / R)) for the linear shape.
[[nodiscard]] std::uint32_t kernel_weight(int x, int y, const WeightKernel& kernel) noexcept;

/// Serial reference: sums w, x*w and y*w over the set pixels of window ∩ mask.
/// Throws empty_region when the clamped window has no area.
[[nodiscard]] Moments weighted_moments(const BinaryMask& mask, const Rect& window,
                                       const WeightKernel& kernel);

/// Splits the window into `workers` row stripes, accumulates each stripe
/// independently and combines the partials with a balanced pairwise tree.
/// Bit-identical to weighted_moments for every worker count.
[[nodiscard]] Moments parallel_moments(const BinaryMask& mask, const Rect& window,
                                       const WeightKernel& kernel, int workers);

struct WindowEstimate {
    Point2d centroid;  // pixel-index coordinates
    int w = 0;
    int h = 0;
};

inline constexpr int kMinWindowSide = 4;

/// Centroid (m10/m00, m01/m00) and a window sized from the equivalent area
/// A = m00/256: w = round(c*sqrt(A*r)), h = round(c*sqrt(A/r)) with r the
/// aspect of `prev`. Returns nullopt when m00 == 0 (target lost).
[[nodiscard]] std::optional<WindowEstimate> centroid_and_size(const Moments& m, const Rect& prev,
                                                              double size_cal = 1.2);

}  // namespace camtrack
