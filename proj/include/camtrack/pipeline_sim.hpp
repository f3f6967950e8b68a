#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace camtrack::sim {

enum class Direction { read, write };

struct Channel {
    std::string name;
    Direction direction = Direction::write;
    double bits_per_pixel = 0.0;

    friend bool operator==(const Channel&, const Channel&) = default;
};

/// Frame-buffer traffic: the camera writes 4:2:2 frames, the video path reads
/// them back, the ROI mask is written and read at 1 bpp, and the composited
/// output is written and read for display. Frames stay in 4:2:2 in memory.
[[nodiscard]] std::vector<Channel> default_channels();

/// Parses "name:read|write:bpp" entries separated by commas.
[[nodiscard]] std::vector<Channel> parse_channels(std::string_view text);
[[nodiscard]] std::string format_channels(const std::vector<Channel>& channels);

struct SimConfig {
    int width = 1920;
    int height = 1080;
    double fps = 60.0;
    std::vector<Channel> channels = default_channels();
    int regions = 2;
    int frames_per_region = 4;
    int group_size = 2;
    double max_bandwidth = 10.0;  // Gbit/s
    double overhead = 1.0;        // multiplier on raw channel traffic
    bool group_tracking = false;  // track a whole group per slot instead of one frame
    double clock_mhz = 148.5;     // recorded only, not simulated

    /// Throws invalid_parameter for configurations the schedule cannot honor.
    void validate() const;
};

enum class Stage { convert_mark, track, display };

[[nodiscard]] std::string_view to_string(Stage s);

struct FrameEvent {
    int slot = 0;
    int frame = 0;
    Stage stage = Stage::convert_mark;
    int region = 0;
    int buffer = 0;  // index within the region

    friend bool operator==(const FrameEvent&, const FrameEvent&) = default;
};

struct ChannelBandwidth {
    std::string name;
    Direction direction = Direction::write;
    double gbit_per_s = 0.0;
};

struct Bandwidth {
    std::vector<ChannelBandwidth> channels;
    double total = 0.0;
    double budget = 0.0;
    bool within_budget = true;
};

struct SimReport {
    std::vector<FrameEvent> events;
    int slots = 0;
    double steady_throughput = 0.0;  // frames per slot after warm-up
    int display_latency = 0;         // slots from CONVERT_MARK to DISPLAY
    int warmup_slots = 0;
    int hazards = 0;                 // buffer reads that collide with a write
    int group_conflicts = 0;         // slots where a group is written and displayed
    Bandwidth bandwidth;
};

/// Slot-synchronous model: in slot s frame s is converted and marked, frame
/// s-1 is tracked and frame s-2 is displayed. Requires n_frames >= 3.
[[nodiscard]] SimReport simulate(const SimConfig& cfg, int n_frames);

/// Same schedule without the layout checks of SimConfig::validate(), so that
/// undersized buffer layouts show up as hazards instead of being rejected.
[[nodiscard]] SimReport simulate_unchecked(const SimConfig& cfg, int n_frames);

/// Slots between a frame's CONVERT_MARK and its DISPLAY.
[[nodiscard]] int display_latency(const SimConfig& cfg);

/// width * height * bpp * fps per channel, in Gbit/s (1e9 bits).
[[nodiscard]] Bandwidth aggregate_bandwidth(const SimConfig& cfg);

[[nodiscard]] nlohmann::json to_json(const SimReport& report, const SimConfig& cfg);
[[nodiscard]] std::string render_table(const SimReport& report);

}  // namespace camtrack::sim
