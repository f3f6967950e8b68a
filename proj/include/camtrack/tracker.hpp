#pragma once

#include <optional>
#include <utility>
#include <string_view>

#include "camtrack/classifier.hpp"
#include "camtrack/imaging.hpp"
#include "camtrack/kalman.hpp"
#include "camtrack/moments.hpp"

namespace camtrack {

enum class TrackMode { camshift, kalman };

[[nodiscard]] std::string_view to_string(TrackMode m);

/// Where each frame's meanshift search starts.
enum class SearchStart { kalman_prediction, previous_box };

[[nodiscard]] std::optional<SearchStart> parse_search_start(std::string_view s);
[[nodiscard]] std::string_view to_string(SearchStart s);

struct TrackerConfig {
    ClassifierParams classifier;
    KalmanParams kalman;
    int max_iters = 10;
    double converge_eps = 1.0;  // px
    double size_ratio_t = 1.5;  // accepted area ratio band [1/t, t]
    int workers = 1;
    double search_margin = 1.5;  // search window side = margin * box side
    SearchStart search_start = SearchStart::kalman_prediction;
    KernelShape kernel = KernelShape::linear;
    double radius_factor = 0.5;  // kernel radius = factor * search-window diagonal
    double size_cal = 1.2;
    bool mean_over_mask = false;  // average only classified pixels of the box

    void validate() const;
};

struct TrackerState {
    Rect box;  // last accepted box
    HsvMean hsv_mean;
    KalmanState kalman;
    TrackMode mode = TrackMode::camshift;
    int frame_index = 0;
    int frame_width = 0;
    int frame_height = 0;
};

struct TrackOutput {
    Rect box;
    TrackMode mode = TrackMode::camshift;
    Point2d centroid;  // continuous coordinates, same convention as Rect::center()
    int iterations = 0;
    std::uint64_t m00 = 0;
};

struct MeanshiftResult {
    Rect window;
    Point2d centroid;  // pixel-index coordinates
    int iterations = 0;
    Moments moments;
};

/// Moves a fixed-size window to the kernel-weighted centroid of the mask until
/// the shift drops below converge_eps or max_iters is reached. The kernel is
/// centered on the previous iterate. nullopt when the first window is empty.
[[nodiscard]] std::optional<MeanshiftResult> meanshift_converge(const BinaryMask& mask,
                                                                const Rect& start,
                                                                Point2d kernel_center,
                                                                const TrackerConfig& config);

/// Clamps the box to the frame; throws empty_region if nothing remains.
[[nodiscard]] TrackerState init(const HsvFrame& frame, const Rect& init_box,
                                const TrackerConfig& config);

/// Classify, converge, size, then accept the Camshift box or fall back to the
/// Kalman prediction when the target is lost or its area jumps. The
/// classification mask is copied to `mask_out` when given.
[[nodiscard]] std::pair<TrackerState, TrackOutput> track_frame(const TrackerState& state,
                                                               const HsvFrame& frame,
                                                               const TrackerConfig& config,
                                                               BinaryMask* mask_out = nullptr);

/// Convenience owner of one target's state.
class Tracker {
public:
    explicit Tracker(TrackerConfig config) : config_(std::move(config)) { config_.validate(); }

    void init(const HsvFrame& frame, const Rect& box) { state_ = camtrack::init(frame, box, config_); }
    TrackOutput update(const HsvFrame& frame);

    [[nodiscard]] const TrackerState& state() const;
    [[nodiscard]] const TrackerConfig& config() const noexcept { return config_; }
    [[nodiscard]] const BinaryMask& last_mask() const noexcept { return last_mask_; }

private:
    TrackerConfig config_;
    std::optional<TrackerState> state_;
    BinaryMask last_mask_;
};

}  // namespace camtrack
