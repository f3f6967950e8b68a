#include "camtrack/classifier.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "parallel.hpp"

namespace camtrack {

Q8Weight Q8Weight::from_double(double w) {
    if (!(w >= 0.0 && w <= 1.0)) {
        throw Error(ErrorKind::invalid_parameter,
                    "classifier weight " + std::to_string(w) + " outside [0, 1]");
    }
    return Q8Weight{static_cast<std::uint16_t>(std::lround(w * 256.0))};
}

void ClassifierParams::validate() const {
    auto positive = [](int v, const char* name) {
        if (v <= 0) {
            throw Error(ErrorKind::invalid_parameter,
                        std::string("classifier.") + name + " must be > 0, got " + std::to_string(v));
        }
    };
    positive(h_t, "h_t");
    positive(s_t, "s_t");
    positive(v_t, "v_t");
    positive(a_t, "a_t");
    const int sum = alpha.raw + beta.raw + gamma.raw;
    if (std::abs(sum - 256) > 1) {
        throw Error(ErrorKind::invalid_parameter,
                    "classifier weights must sum to 1 (alpha+beta+gamma = " +
                        std::to_string(sum / 256.0) + ")");
    }
}

// ---------------------------------------------------------------------------

BinaryMask::BinaryMask(int width, int height)
    : width_(width), height_(height), stride_((std::size_t(std::max(width, 0)) + 63) / 64) {
    if (width <= 0 || height <= 0) {
        throw Error(ErrorKind::malformed_frame, "mask: nonpositive size");
    }
    words_.assign(stride_ * std::size_t(height), 0);
}

std::uint64_t BinaryMask::popcount() const noexcept {
    std::uint64_t n = 0;
    for (auto w : words_) n += std::uint64_t(std::popcount(w));
    return n;
}

std::uint64_t BinaryMask::popcount(const Rect& r) const noexcept {
    const auto clipped = clamp_to_frame(r, width_, height_);
    if (!clipped) return 0;
    std::uint64_t n = 0;
    for (int y = clipped->y; y < clipped->bottom(); ++y) {
        for (int x = clipped->x; x < clipped->right(); ++x) n += get(x, y) ? 1 : 0;
    }
    return n;
}

// ---------------------------------------------------------------------------

bool classify_pixel(const Hsv& pixel, const HsvMean& mean, const ClassifierParams& params) noexcept {
    const int dh = hue_distance(pixel[0], mean.h);
    const int ds = std::abs(int{pixel[1]} - int{mean.s});
    const int dv = std::abs(int{pixel[2]} - int{mean.v});
    const bool h_kc = dh < params.h_t;
    const bool s_kc = ds < params.s_t;
    const bool v_kc = dv < params.v_t;
    // Weighted distance kept in Q0.8; compare against a_t scaled to match.
    const int weighted = params.alpha.raw * dh + params.beta.raw * ds + params.gamma.raw * dv;
    const bool a_kc = weighted < params.a_t * 256;
    return h_kc && s_kc && v_kc && a_kc;
}

namespace {

// Per-channel lookup of the threshold pass bit and the Q0.8 weighted distance.
// A pixel is ROI iff all three pass bits are set and the weighted terms sum
// below a_t * 256; identical to classify_pixel for every input.
struct ChannelTable {
    std::array<std::uint16_t, 256> weighted{};
    std::array<bool, 256> pass{};
};

struct ClassifierTables {
    ChannelTable h, s, v;
    int weighted_limit = 0;

    ClassifierTables(const HsvMean& mean, const ClassifierParams& p) : weighted_limit(p.a_t * 256) {
        for (int c = 0; c < 256; ++c) {
            const auto u = static_cast<std::uint8_t>(c);
            const int dh = hue_distance(u, mean.h);
            const int ds = std::abs(c - int{mean.s});
            const int dv = std::abs(c - int{mean.v});
            h.pass[c] = dh < p.h_t;
            s.pass[c] = ds < p.s_t;
            v.pass[c] = dv < p.v_t;
            h.weighted[c] = static_cast<std::uint16_t>(p.alpha.raw * dh);
            s.weighted[c] = static_cast<std::uint16_t>(p.beta.raw * ds);
            v.weighted[c] = static_cast<std::uint16_t>(p.gamma.raw * dv);
        }
    }
};

}  // namespace

BinaryMask classify_frame(const HsvFrame& frame, const HsvMean& mean,
                          const ClassifierParams& params, int workers) {
    if (frame.empty()) throw Error(ErrorKind::malformed_frame, "HSV frame: empty");
    BinaryMask mask(frame.width(), frame.height());
    const ClassifierTables t(mean, params);
    const int width = frame.width();

    detail::for_each_stripe(frame.height(), std::min(workers, frame.height()),
                            [&](int, int y0, int y1) {
        for (int y = y0; y < y1; ++y) {
            const auto px = frame.row(y);
            auto words = mask.row_words(y);
            for (int x0 = 0; x0 < width; x0 += 64) {
                const int n = std::min(64, width - x0);
                std::uint64_t bits = 0;
                const std::uint8_t* p = px.data() + std::size_t(x0) * 3;
                for (int i = 0; i < n; ++i, p += 3) {
                    const bool pass = t.h.pass[p[0]] & t.s.pass[p[1]] & t.v.pass[p[2]];
                    const int w = t.h.weighted[p[0]] + t.s.weighted[p[1]] + t.v.weighted[p[2]];
                    bits |= std::uint64_t(pass & (w < t.weighted_limit)) << i;
                }
                words[std::size_t(x0 >> 6)] = bits;
            }
        }
    });
    return mask;
}

namespace {

Rect clipped_box(const HsvFrame& frame, const Rect& box) {
    const auto clipped = clamp_to_frame(box, frame.width(), frame.height());
    if (!clipped) {
        throw Error(ErrorKind::empty_region, "box does not intersect the frame");
    }
    return *clipped;
}

HsvMean rounded_mean(const std::array<std::uint64_t, 3>& sum, std::uint64_t n) {
    auto avg = [n](std::uint64_t s) { return static_cast<std::uint8_t>((s + n / 2) / n); };
    return {avg(sum[0]), avg(sum[1]), avg(sum[2])};
}

}  // namespace

HsvMean compute_hsv_mean(const HsvFrame& frame, const Rect& box) {
    const Rect r = clipped_box(frame, box);
    std::array<std::uint64_t, 3> sum{};
    for (int y = r.y; y < r.bottom(); ++y) {
        const auto px = frame.row(y);
        for (int x = r.x; x < r.right(); ++x) {
            for (int c = 0; c < 3; ++c) sum[c] += px[std::size_t(x) * 3 + c];
        }
    }
    return rounded_mean(sum, std::uint64_t(r.area()));
}

HsvMean compute_hsv_mean(const HsvFrame& frame, const Rect& box, const BinaryMask& mask) {
    const Rect r = clipped_box(frame, box);
    std::array<std::uint64_t, 3> sum{};
    std::uint64_t n = 0;
    for (int y = r.y; y < r.bottom(); ++y) {
        const auto px = frame.row(y);
        for (int x = r.x; x < r.right(); ++x) {
            if (!mask.get(x, y)) continue;
            ++n;
            for (int c = 0; c < 3; ++c) sum[c] += px[std::size_t(x) * 3 + c];
        }
    }
    if (n == 0) return compute_hsv_mean(frame, r);
    return rounded_mean(sum, n);
}

void write_pbm(const std::filesystem::path& path, const BinaryMask& mask) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, path.string() + ": cannot open for writing");
    out << "P4\n" << mask.width() << ' ' << mask.height() << '\n';
    std::vector<char> row(std::size_t(mask.width() + 7) / 8);
    for (int y = 0; y < mask.height(); ++y) {
        std::fill(row.begin(), row.end(), 0);
        for (int x = 0; x < mask.width(); ++x) {
            if (mask.get(x, y)) row[std::size_t(x) / 8] |= char(0x80 >> (x % 8));
        }
        out.write(row.data(), std::streamsize(row.size()));
    }
    if (!out) throw Error(ErrorKind::io, path.string() + ": write failed");
}

}  // namespace camtrack
