#include "camtrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace camtrack {

std::string_view to_string(TrackMode m) { return m == TrackMode::kalman ? "KALMAN" : "CAMSHIFT"; }

std::optional<SearchStart> parse_search_start(std::string_view s) {
    if (s == "kalman") return SearchStart::kalman_prediction;
    if (s == "previous") return SearchStart::previous_box;
    return std::nullopt;
}

std::string_view to_string(SearchStart s) {
    return s == SearchStart::previous_box ? "previous" : "kalman";
}

void TrackerConfig::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::invalid_parameter, what); };
    classifier.validate();
    kalman.validate();
    if (max_iters < 1) fail("tracker.max_iters must be >= 1");
    if (!(converge_eps > 0.0)) fail("tracker.converge_eps must be > 0");
    if (!(size_ratio_t > 1.0)) fail("tracker.size_ratio_t must be > 1");
    if (workers < 1) fail("tracker.workers must be >= 1");
    if (!(search_margin >= 1.0) || !std::isfinite(search_margin)) {
        fail("tracker.search_margin must be a finite value >= 1");
    }
    if (!(radius_factor > 0.0)) fail("moments.radius_factor must be > 0");
    if (!(size_cal > 0.0) || !std::isfinite(size_cal)) fail("moments.size_cal must be > 0");
}

namespace {

constexpr double kHalfPixel = 0.5;

Point2d to_continuous(Point2d pixel_index) {
    return {pixel_index.x + kHalfPixel, pixel_index.y + kHalfPixel};
}
Point2d to_pixel_index(Point2d continuous) {
    return {continuous.x - kHalfPixel, continuous.y - kHalfPixel};
}

Point2d clamp_into(Point2d p, int width, int height) {
    return {std::clamp(p.x, 0.0, double(width)), std::clamp(p.y, 0.0, double(height))};
}

}  // namespace

std::optional<MeanshiftResult> meanshift_converge(const BinaryMask& mask, const Rect& start,
                                                  Point2d kernel_center,
                                                  const TrackerConfig& config) {
    MeanshiftResult result;
    Rect window = fit_centered(start.center(), start.w, start.h, mask.width(), mask.height());
    Point2d center = kernel_center;
    const double radius = config.radius_factor * std::hypot(double(window.w), double(window.h));

    for (int it = 1; it <= config.max_iters; ++it) {
        const WeightKernel kernel{center, radius, config.kernel};
        const Moments m = parallel_moments(mask, window, kernel, config.workers);
        if (m.m00 == 0) {
            if (it == 1) return std::nullopt;
            break;
        }
        const Point2d c{double(m.m10) / double(m.m00), double(m.m01) / double(m.m00)};
        const double shift = std::hypot(c.x - center.x, c.y - center.y);
        window = fit_centered(to_continuous(c), window.w, window.h, mask.width(), mask.height());
        center = c;
        result = {window, c, it, m};
        if (shift < config.converge_eps) break;
    }
    return result;
}

TrackerState init(const HsvFrame& frame, const Rect& init_box, const TrackerConfig& config) {
    config.validate();
    if (!init_box.valid()) {
        throw Error(ErrorKind::empty_region, "initial box has zero area");
    }
    const auto box = clamp_to_frame(init_box, frame.width(), frame.height());
    if (!box) throw Error(ErrorKind::empty_region, "initial box does not intersect the frame");

    TrackerState s;
    s.box = *box;
    s.hsv_mean = compute_hsv_mean(frame, *box);
    s.kalman = init_state(*box, config.kalman);
    s.mode = TrackMode::camshift;
    s.frame_index = 0;
    s.frame_width = frame.width();
    s.frame_height = frame.height();
    return s;
}

std::pair<TrackerState, TrackOutput> track_frame(const TrackerState& state, const HsvFrame& frame,
                                                 const TrackerConfig& config,
                                                 BinaryMask* mask_out) {
    if (frame.width() != state.frame_width || frame.height() != state.frame_height) {
        throw Error(ErrorKind::resolution_mismatch,
                    "frame is " + std::to_string(frame.width()) + "x" +
                        std::to_string(frame.height()) + ", tracker was initialized at " +
                        std::to_string(state.frame_width) + "x" +
                        std::to_string(state.frame_height));
    }
    const int width = frame.width();
    const int height = frame.height();

    BinaryMask mask = classify_frame(frame, state.hsv_mean, config.classifier, config.workers);
    const KalmanState predicted = predict(state.kalman, config.kalman);

    const Point2d start = clamp_into(config.search_start == SearchStart::kalman_prediction
                                         ? predicted.position()
                                         : state.box.center(),
                                     width, height);
    const Rect search =
        fit_centered(start, int(std::lround(config.search_margin * state.box.w)),
                     int(std::lround(config.search_margin * state.box.h)), width, height);
    const auto ms = meanshift_converge(mask, search, to_pixel_index(start), config);

    std::optional<Rect> candidate;
    std::optional<WindowEstimate> estimate;
    if (ms) {
        estimate = centroid_and_size(ms->moments, state.box, config.size_cal);
        if (estimate) {
            candidate = fit_centered(to_continuous(estimate->centroid), estimate->w, estimate->h,
                                     width, height);
            const double ratio = double(candidate->area()) / double(state.box.area());
            if (ratio < 1.0 / config.size_ratio_t || ratio > config.size_ratio_t) {
                candidate.reset();
            }
        }
    }

    TrackerState next = state;
    TrackOutput out;
    out.iterations = ms ? ms->iterations : 1;
    out.m00 = ms ? ms->moments.m00 : 0;
    if (candidate) {
        const Point2d measured = to_continuous(estimate->centroid);
        next.box = *candidate;
        next.kalman = correct(predicted, measured, config.kalman);
        next.hsv_mean = config.mean_over_mask ? compute_hsv_mean(frame, *candidate, mask)
                                              : compute_hsv_mean(frame, *candidate);
        next.mode = TrackMode::camshift;
        out.centroid = measured;
    } else {
        // No trusted measurement: predict only, keep the last accepted size.
        next.kalman = predicted;
        next.box = fit_centered(predicted.position(), state.box.w, state.box.h, width, height);
        next.mode = TrackMode::kalman;
        out.centroid = predicted.position();
    }
    next.frame_index = state.frame_index + 1;
    out.box = next.box;
    out.mode = next.mode;
    if (mask_out) *mask_out = std::move(mask);
    return {std::move(next), out};
}

TrackOutput Tracker::update(const HsvFrame& frame) {
    if (!state_) throw Error(ErrorKind::invalid_parameter, "tracker used before init()");
    auto [next, out] = track_frame(*state_, frame, config_, &last_mask_);
    state_ = std::move(next);
    return out;
}

const TrackerState& Tracker::state() const {
    if (!state_) throw Error(ErrorKind::invalid_parameter, "tracker used before init()");
    return *state_;
}

}  // namespace camtrack
