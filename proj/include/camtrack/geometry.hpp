#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>

namespace camtrack {

struct Point2d {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2d&, const Point2d&) = default;
};

/// Axis-aligned pixel box; (x, y) is the top-left pixel, 0-based.
struct Rect {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;

    [[nodiscard]] bool valid() const noexcept { return w >= 1 && h >= 1; }
    [[nodiscard]] std::int64_t area() const noexcept {
        return valid() ? std::int64_t{w} * h : 0;
    }
    [[nodiscard]] int right() const noexcept { return x + w; }   // exclusive
    [[nodiscard]] int bottom() const noexcept { return y + h; }  // exclusive
    /// Continuous-coordinate center: pixel i spans [i, i + 1).
    [[nodiscard]] Point2d center() const noexcept { return {x + 0.5 * w, y + 0.5 * h}; }
    [[nodiscard]] bool contains(int px, int py) const noexcept {
        return px >= x && px < right() && py >= y && py < bottom();
    }

    friend bool operator==(const Rect&, const Rect&) = default;
    friend std::ostream& operator<<(std::ostream& os, const Rect& r) {
        return os << '(' << r.x << ',' << r.y << ',' << r.w << ',' << r.h << ')';
    }
};

/// Intersection of two boxes, or nullopt when they do not overlap.
[[nodiscard]] inline std::optional<Rect> intersect(const Rect& a, const Rect& b) {
    const int x0 = std::max(a.x, b.x);
    const int y0 = std::max(a.y, b.y);
    const int x1 = std::min(a.right(), b.right());
    const int y1 = std::min(a.bottom(), b.bottom());
    if (x1 <= x0 || y1 <= y0) return std::nullopt;
    return Rect{x0, y0, x1 - x0, y1 - y0};
}

/// Clips `r` to a width x height frame.
[[nodiscard]] inline std::optional<Rect> clamp_to_frame(const Rect& r, int width, int height) {
    return intersect(r, Rect{0, 0, width, height});
}

/// Box of size w x h whose continuous center is as close to `center` as the frame allows.
/// Size is kept unless it exceeds the frame, in which case it is clipped.
[[nodiscard]] Rect fit_centered(Point2d center, int w, int h, int frame_w, int frame_h);

}  // namespace camtrack
