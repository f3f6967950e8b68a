#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "camtrack/geometry.hpp"
#include "camtrack/imaging.hpp"
#include "camtrack/tracker.hpp"

namespace camtrack::bench {

using GroundTruth = std::vector<Rect>;

/// Fraction of frames passing each threshold; auc is the mean over the grid.
struct Curve {
    std::vector<double> thresholds;
    std::vector<double> values;
    double auc = 0.0;
};

/// Intersection over union with exact integer areas.
[[nodiscard]] double iou(const Rect& a, const Rect& b);

/// Euclidean distance between box centers.
[[nodiscard]] double center_error(const Rect& a, const Rect& b);

[[nodiscard]] std::vector<double> default_success_thresholds();    // 0, 0.05, ..., 1
[[nodiscard]] std::vector<double> default_precision_thresholds();  // 0, 1, ..., 50 px
inline constexpr double kPrecisionAtPx = 20.0;

/// value(t) = fraction of frames with iou > t.
[[nodiscard]] Curve success_curve(const std::vector<Rect>& results, const GroundTruth& gt,
                                  const std::vector<double>& thresholds = default_success_thresholds());

struct PrecisionResult {
    Curve curve;
    double at_20px = 0.0;
};

/// value(t) = fraction of frames with center error <= t.
[[nodiscard]] PrecisionResult precision_curve(
    const std::vector<Rect>& results, const GroundTruth& gt,
    const std::vector<double>& thresholds = default_precision_thresholds());

/// One "x,y,w,h" per line (comma, tab or space separated), 1-based on disk,
/// returned 0-based.
[[nodiscard]] GroundTruth load_ground_truth(const std::filesystem::path& path);

/// Frames already decoded to HSV so that timing covers tracking only.
struct BenchSequence {
    std::string name;
    std::vector<HsvFrame> frames;
    GroundTruth truth;
    Rect init;
};

[[nodiscard]] BenchSequence load_bench_sequence(std::string name, const Sequence& seq,
                                                GroundTruth truth, Rect init,
                                                ColorMatrix matrix = ColorMatrix::bt709_limited);

struct SequenceResult {
    std::string name;
    bool ok = false;
    std::string error;
    std::vector<Rect> boxes;
    std::vector<TrackMode> modes;
    std::vector<double> ious;
    std::vector<double> center_errors;
    Curve success;
    PrecisionResult precision;
    double mean_fps = 0.0;
};

struct BenchReport {
    std::vector<SequenceResult> sequences;
    double mean_auc = 0.0;
    double mean_precision_20px = 0.0;
    double mean_fps = 0.0;
    int failed = 0;
};

/// Tracks every sequence from its first-frame box (one-pass evaluation). A
/// failing sequence is recorded and the run continues.
[[nodiscard]] BenchReport run_benchmark(const std::vector<BenchSequence>& sequences,
                                        const TrackerConfig& config);

enum class Format { csv, json, svg };

[[nodiscard]] std::set<Format> parse_formats(std::string_view text);
[[nodiscard]] std::string format_formats(const std::set<Format>& formats);

[[nodiscard]] nlohmann::json to_json(const BenchReport& report);

/// Writes frames.csv, report.json, and success/precision SVG plots (aggregate
/// plus one per sequence) into `dir`. Returns the files written.
std::vector<std::filesystem::path> emit_report(const BenchReport& report,
                                               const std::set<Format>& formats,
                                               const std::filesystem::path& dir);

}  // namespace camtrack::bench
