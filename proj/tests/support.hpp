#pragma once
// Reference implementations written straight from the definitions, kept
// deliberately naive so they share no code path with the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <vector>

#include "camtrack/bench.hpp"
#include "camtrack/classifier.hpp"
#include "camtrack/imaging.hpp"
#include "camtrack/moments.hpp"

namespace oracle {

using camtrack::Rect;

// Hue distance on the 256-step circle.
inline int circular_distance(int a, int b) {
    const int d = ((a - b) % 256 + 256) % 256;
    return std::min(d, 256 - d);
}

inline bool classify(const camtrack::Hsv& p, const camtrack::HsvMean& m,
                     const camtrack::ClassifierParams& prm) {
    const int dh = circular_distance(p[0], m.h);
    const int ds = std::abs(p[1] - m.s);
    const int dv = std::abs(p[2] - m.v);
    // Weights are k/256 exactly, so compare in rational form: sum k*d / 256 < a_t.
    const long num = long(prm.alpha.raw) * dh + long(prm.beta.raw) * ds + long(prm.gamma.raw) * dv;
    return dh < prm.h_t && ds < prm.s_t && dv < prm.v_t && num < long(prm.a_t) * 256;
}

// Float reference for limited-range YCbCr -> RGB.
inline std::array<int, 3> ycbcr_to_rgb(int y, int cb, int cr, double kr, double kb) {
    const double kg = 1.0 - kr - kb;
    const double yl = (y - 16) * 255.0 / 219.0;
    const double pb = (cb - 128) * 255.0 / 224.0;
    const double pr = (cr - 128) * 255.0 / 224.0;
    const double r = yl + 2.0 * (1.0 - kr) * pr;
    const double b = yl + 2.0 * (1.0 - kb) * pb;
    const double g = (yl - kr * r - kb * b) / kg;
    auto q = [](double v) { return int(std::clamp(std::lround(v), 0L, 255L)); };
    return {q(r), q(g), q(b)};
}

// Float reference for the 8-bit HSV definition.
inline std::array<int, 3> rgb_to_hsv(int r, int g, int b) {
    const int mx = std::max({r, g, b});
    const int mn = std::min({r, g, b});
    const double d = mx - mn;
    double deg = 0.0;
    if (d > 0) {
        if (mx == r) {
            deg = 60.0 * std::fmod((g - b) / d + 6.0, 6.0);
        } else if (mx == g) {
            deg = 60.0 * ((b - r) / d + 2.0);
        } else {
            deg = 60.0 * ((r - g) / d + 4.0);
        }
    }
    const int h = int(std::floor(256.0 * deg / 360.0 + 1e-9)) % 256;
    const int s = mx == 0 ? 0 : int(std::floor(255.0 * d / mx + 1e-9));
    return {h, s, mx};
}

inline std::uint64_t weight(int x, int y, const camtrack::WeightKernel& k) {
    if (k.shape == camtrack::KernelShape::uniform || std::isinf(k.radius)) return 256;
    const double d = std::hypot(x - k.center.x, y - k.center.y);
    const double p = k.shape == camtrack::KernelShape::linear
                         ? 1.0 - d / k.radius
                         : 1.0 - (d * d) / (k.radius * k.radius);
    return p <= 0.0 ? 0 : std::uint64_t(std::floor(256.0 * p + 0.5));
}

inline camtrack::Moments moments(const camtrack::BinaryMask& mask, const Rect& win,
                                 const camtrack::WeightKernel& k) {
    camtrack::Moments m;
    for (int y = 0; y < mask.height(); ++y) {
        for (int x = 0; x < mask.width(); ++x) {
            const bool inside = x >= win.x && x < win.x + win.w && y >= win.y && y < win.y + win.h;
            if (!inside || !mask.get(x, y)) continue;
            const auto w = weight(x, y, k);
            m.m00 += w;
            m.m10 += w * std::uint64_t(x);
            m.m01 += w * std::uint64_t(y);
        }
    }
    return m;
}

// IoU by painting both boxes on a grid that covers them and counting cells.
inline double raster_iou(const Rect& a, const Rect& b) {
    const int x0 = std::min(a.x, b.x);
    const int y0 = std::min(a.y, b.y);
    const int x1 = std::max(a.x + a.w, b.x + b.w);
    const int y1 = std::max(a.y + a.h, b.y + b.h);
    long inter = 0;
    long uni = 0;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const bool in_a = x >= a.x && x < a.x + a.w && y >= a.y && y < a.y + a.h;
            const bool in_b = x >= b.x && x < b.x + b.w && y >= b.y && y < b.y + b.h;
            inter += in_a && in_b;
            uni += in_a || in_b;
        }
    }
    return uni == 0 ? 0.0 : double(inter) / double(uni);
}

inline std::vector<double> success_values(const std::vector<double>& ious,
                                          const std::vector<double>& grid) {
    std::vector<double> out;
    for (double t : grid) {
        int n = 0;
        for (double v : ious) n += v > t ? 1 : 0;
        out.push_back(double(n) / double(ious.size()));
    }
    return out;
}

inline std::vector<double> precision_values(const std::vector<double>& errors,
                                            const std::vector<double>& grid) {
    std::vector<double> out;
    for (double t : grid) {
        int n = 0;
        for (double e : errors) n += e <= t ? 1 : 0;
        out.push_back(double(n) / double(errors.size()));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Random inputs

inline camtrack::HsvFrame random_hsv_frame(std::mt19937& rng, int w, int h) {
    std::uniform_int_distribution<int> byte(0, 255);
    std::vector<std::uint8_t> data(std::size_t(w) * h * 3);
    for (auto& v : data) v = std::uint8_t(byte(rng));
    return camtrack::HsvFrame(w, h, std::move(data));
}

// Clustered frame: most pixels near one color so masks are not trivially empty.
inline camtrack::HsvFrame clustered_hsv_frame(std::mt19937& rng, int w, int h,
                                              const camtrack::HsvMean& around, int spread) {
    std::uniform_int_distribution<int> off(-spread, spread);
    std::uniform_int_distribution<int> byte(0, 255);
    std::bernoulli_distribution wild(0.2);
    camtrack::HsvFrame f(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (wild(rng)) {
                f.set_pixel(x, y, {std::uint8_t(byte(rng)), std::uint8_t(byte(rng)),
                                   std::uint8_t(byte(rng))});
            } else {
                f.set_pixel(x, y, {std::uint8_t((around.h + off(rng)) & 255),
                                   std::uint8_t(std::clamp(around.s + off(rng), 0, 255)),
                                   std::uint8_t(std::clamp(around.v + off(rng), 0, 255))});
            }
        }
    }
    return f;
}

inline camtrack::ClassifierParams random_params(std::mt19937& rng) {
    std::uniform_int_distribution<int> thr(1, 128);
    std::uniform_int_distribution<int> wa(0, 256);
    camtrack::ClassifierParams p;
    p.h_t = thr(rng);
    p.s_t = thr(rng);
    p.v_t = thr(rng);
    p.a_t = thr(rng);
    const int a = wa(rng);
    const int b = std::uniform_int_distribution<int>(0, 256 - a)(rng);
    p.alpha.raw = std::uint16_t(a);
    p.beta.raw = std::uint16_t(b);
    p.gamma.raw = std::uint16_t(256 - a - b);
    return p;
}

inline camtrack::BinaryMask random_mask(std::mt19937& rng, int w, int h, double density) {
    camtrack::BinaryMask m(w, h);
    std::bernoulli_distribution bit(density);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) m.set(x, y, bit(rng));
    }
    return m;
}

inline Rect random_window(std::mt19937& rng, int w, int h) {
    std::uniform_int_distribution<int> xs(-w / 4, w - 1);
    std::uniform_int_distribution<int> ys(-h / 4, h - 1);
    const int x = xs(rng);
    const int y = ys(rng);
    const int rw = std::uniform_int_distribution<int>(std::max(1, 1 - x), w + w / 4)(rng);
    const int rh = std::uniform_int_distribution<int>(std::max(1, 1 - y), h + h / 4)(rng);
    return Rect{x, y, rw, rh};
}

inline camtrack::WeightKernel random_kernel(std::mt19937& rng, int w, int h) {
    std::uniform_real_distribution<double> cx(0.0, w);
    std::uniform_real_distribution<double> cy(0.0, h);
    std::uniform_real_distribution<double> r(1.0, double(std::max(w, h)));
    const int shape = std::uniform_int_distribution<int>(0, 3)(rng);
    camtrack::WeightKernel k;
    k.center = {cx(rng), cy(rng)};
    k.radius = shape == 3 ? std::numeric_limits<double>::infinity() : r(rng);
    k.shape = shape == 1 ? camtrack::KernelShape::epanechnikov
              : shape == 2 ? camtrack::KernelShape::uniform
                           : camtrack::KernelShape::linear;
    return k;
}

}  // namespace oracle
