#include "camtrack/moments.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

#include "parallel.hpp"

namespace camtrack {

std::optional<KernelShape> parse_kernel_shape(std::string_view s) {
    if (s == "linear") return KernelShape::linear;
    if (s == "epanechnikov") return KernelShape::epanechnikov;
    if (s == "uniform") return KernelShape::uniform;
    return std::nullopt;
}

std::string_view to_string(KernelShape k) {
    switch (k) {
        case KernelShape::linear: return "linear";
        case KernelShape::epanechnikov: return "epanechnikov";
        case KernelShape::uniform: return "uniform";
    }
    return "linear";
}

std::uint32_t kernel_weight(int x, int y, const WeightKernel& kernel) noexcept {
    if (kernel.shape == KernelShape::uniform || std::isinf(kernel.radius)) return kWeightOne;
    if (!(kernel.radius > 0.0)) return 0;
    const double dx = x - kernel.center.x;
    const double dy = y - kernel.center.y;
    const double d2 = dx * dx + dy * dy;
    double profile;
    if (kernel.shape == KernelShape::epanechnikov) {
        profile = 1.0 - d2 / (kernel.radius * kernel.radius);
    } else {
        profile = 1.0 - std::sqrt(d2) / kernel.radius;
    }
    if (profile <= 0.0) return 0;
    return static_cast<std::uint32_t>(std::floor(kWeightOne * profile + 0.5));
}

namespace {

Rect clamp_window(const BinaryMask& mask, const Rect& window) {
    const auto clipped = clamp_to_frame(window, mask.width(), mask.height());
    if (!clipped) {
        throw Error(ErrorKind::empty_region, "moment window has no area inside the mask");
    }
    return *clipped;
}

// Accumulates rows [y0, y1) of an already clamped window.
Moments accumulate_rows(const BinaryMask& mask, const Rect& win, const WeightKernel& kernel, int y0,
                        int y1) {
    Moments m;
    for (int y = y0; y < y1; ++y) {
        const auto words = mask.row_words(y);
        std::uint64_t row_m00 = 0;
        std::uint64_t row_m10 = 0;
        for (int x = win.x; x < win.right();) {
            const std::uint64_t word = words[std::size_t(x >> 6)] >> (x & 63);
            if (word == 0) {
                x = (x | 63) + 1;  // skip to the next word
                continue;
            }
            if (word & 1u) {
                const std::uint64_t w = kernel_weight(x, y, kernel);
                row_m00 += w;
                row_m10 += w * std::uint64_t(x);
            }
            ++x;
        }
        m.m00 += row_m00;
        m.m10 += row_m10;
        m.m01 += row_m00 * std::uint64_t(y);
    }
    return m;
}

}  // namespace

Moments weighted_moments(const BinaryMask& mask, const Rect& window, const WeightKernel& kernel) {
    const Rect win = clamp_window(mask, window);
    Moments m;
    for (int y = win.y; y < win.bottom(); ++y) {
        for (int x = win.x; x < win.right(); ++x) {
            if (!mask.get(x, y)) continue;
            const std::uint64_t w = kernel_weight(x, y, kernel);
            m.m00 += w;
            m.m10 += w * std::uint64_t(x);
            m.m01 += w * std::uint64_t(y);
        }
    }
    return m;
}

Moments parallel_moments(const BinaryMask& mask, const Rect& window, const WeightKernel& kernel,
                         int workers) {
    if (workers < 1) {
        throw Error(ErrorKind::invalid_parameter, "workers must be >= 1");
    }
    const Rect win = clamp_window(mask, window);
    std::vector<Moments> partial(static_cast<std::size_t>(workers));
    const int hw = int(std::max(1u, std::thread::hardware_concurrency()));
    detail::for_each_stripe(workers, std::min(workers, hw), [&](int, int first, int last) {
        for (int i = first; i < last; ++i) {
            const auto rows = detail::stripe_bounds(win.h, workers, i);
            partial[std::size_t(i)] =
                accumulate_rows(mask, win, kernel, win.y + rows.begin, win.y + rows.end);
        }
    });
    // Balanced pairwise tree over stripe index; fixed order, so reproducible.
    for (std::size_t stride = 1; stride < partial.size(); stride *= 2) {
        for (std::size_t i = 0; i + stride < partial.size(); i += 2 * stride) {
            partial[i] += partial[i + stride];
        }
    }
    return partial.front();
}

std::optional<WindowEstimate> centroid_and_size(const Moments& m, const Rect& prev,
                                                double size_cal) {
    if (m.m00 == 0) return std::nullopt;
    const double m00 = double(m.m00);
    WindowEstimate est;
    est.centroid = {double(m.m10) / m00, double(m.m01) / m00};
    const double area = m00 / kWeightOne;
    const double aspect = double(prev.w) / double(prev.h);
    est.w = std::max(kMinWindowSide, int(std::lround(size_cal * std::sqrt(area * aspect))));
    est.h = std::max(kMinWindowSide, int(std::lround(size_cal * std::sqrt(area / aspect))));
    return est;
}

}  // namespace camtrack
