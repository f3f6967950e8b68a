#include "camtrack/pipeline_sim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include "camtrack/error.hpp"

namespace camtrack::sim {

std::vector<Channel> default_channels() {
    return {
        {"camera_ycbcr", Direction::write, 16.0},
        {"video", Direction::read, 16.0},
        {"roi_mask", Direction::write, 1.0},
        {"roi_mask", Direction::read, 1.0},
        {"composite", Direction::write, 16.0},
        {"composite", Direction::read, 16.0},
    };
}

namespace {

[[noreturn]] void invalid(const std::string& what) {
    throw Error(ErrorKind::invalid_parameter, what);
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

std::string_view to_string(Direction d) { return d == Direction::read ? "read" : "write"; }

}  // namespace

std::vector<Channel> parse_channels(std::string_view text) {
    std::vector<Channel> out;
    if (trim(text).empty() || trim(text) == "none") return out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = text.find(',', pos);
        const std::string item =
            trim(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        pos = comma == std::string_view::npos ? text.size() + 1 : comma + 1;
        const auto c1 = item.find(':');
        const auto c2 = c1 == std::string::npos ? std::string::npos : item.find(':', c1 + 1);
        if (c2 == std::string::npos) invalid("channel '" + item + "': expected name:read|write:bpp");
        Channel ch;
        ch.name = trim(item.substr(0, c1));
        const std::string dir = trim(item.substr(c1 + 1, c2 - c1 - 1));
        if (dir == "read") {
            ch.direction = Direction::read;
        } else if (dir == "write") {
            ch.direction = Direction::write;
        } else {
            invalid("channel '" + item + "': direction must be read or write");
        }
        try {
            std::size_t used = 0;
            const std::string bpp = trim(item.substr(c2 + 1));
            ch.bits_per_pixel = std::stod(bpp, &used);
            if (used != bpp.size()) throw std::invalid_argument(bpp);
        } catch (const std::exception&) {
            invalid("channel '" + item + "': bad bits per pixel");
        }
        if (ch.name.empty()) invalid("channel '" + item + "': empty name");
        if (!(ch.bits_per_pixel >= 0.0)) invalid("channel '" + item + "': negative bits per pixel");
        out.push_back(std::move(ch));
    }
    return out;
}

std::string format_channels(const std::vector<Channel>& channels) {
    if (channels.empty()) return "none";
    std::ostringstream os;
    for (std::size_t i = 0; i < channels.size(); ++i) {
        if (i) os << ',';
        os << channels[i].name << ':' << to_string(channels[i].direction) << ':'
           << channels[i].bits_per_pixel;
    }
    return os.str();
}

std::string_view to_string(Stage s) {
    switch (s) {
        case Stage::convert_mark: return "CONVERT_MARK";
        case Stage::track: return "TRACK";
        case Stage::display: return "DISPLAY";
    }
    return "?";
}

int display_latency(const SimConfig& cfg) {
    return cfg.group_tracking ? cfg.group_size + 1 : 2;
}

void SimConfig::validate() const {
    if (width <= 0 || height <= 0) invalid("sim.width and sim.height must be > 0");
    if (!(fps > 0.0)) invalid("sim.fps must be > 0");
    if (regions < 2) invalid("sim.regions must be >= 2 for ping-pong addressing");
    if (frames_per_region < 1) invalid("sim.frames_per_region must be >= 1");
    if (group_size < 1) invalid("sim.group_size must be >= 1");
    if (frames_per_region % group_size != 0) {
        invalid("sim.group_size must divide sim.frames_per_region");
    }
    if (!(max_bandwidth > 0.0)) invalid("sim.max_bandwidth must be > 0");
    if (!(overhead > 0.0)) invalid("sim.overhead must be > 0");
    for (const auto& ch : channels) {
        if (!(ch.bits_per_pixel >= 0.0)) invalid("channel " + ch.name + ": negative bits per pixel");
    }
    // A frame's group must differ from the group being displayed, and the
    // group ring must be long enough that the displayed group is not reused.
    const int latency = display_latency(*this);
    if (group_size > latency) {
        invalid("sim.group_size " + std::to_string(group_size) +
                " exceeds the display latency; enable sim.group_tracking or use groups of <= 2");
    }
    const int groups = regions * frames_per_region / group_size;
    const int span = (latency + group_size - 1) / group_size;
    if (groups <= span) {
        invalid("buffer layout holds " + std::to_string(groups) + " groups but the pipeline keeps " +
                std::to_string(span + 1) + " in flight");
    }
}

namespace {

struct Location {
    int region;
    int buffer;
    int group;
    auto operator<=>(const Location&) const = default;
};

// Groups of frames rotate through the buffer ring; consecutive groups
// alternate regions.
Location locate(const SimConfig& cfg, int frame) {
    const int groups = cfg.regions * cfg.frames_per_region / cfg.group_size;
    const int group = (frame / cfg.group_size) % groups;
    const int region = group % cfg.regions;
    const int buffer = (group / cfg.regions) * cfg.group_size + frame % cfg.group_size;
    return {region, buffer, group};
}

int track_slot(const SimConfig& cfg, int frame) {
    if (!cfg.group_tracking) return frame + 1;
    return (frame / cfg.group_size + 1) * cfg.group_size;
}

}  // namespace

SimReport simulate_unchecked(const SimConfig& cfg, int n_frames) {
    if (n_frames < 3) {
        invalid("n_frames must be >= 3 to fill the three-stage pipeline, got " +
                std::to_string(n_frames));
    }
    const int latency = display_latency(cfg);
    SimReport report;
    report.display_latency = latency;
    report.warmup_slots = latency;

    std::multimap<int, FrameEvent> by_slot;
    for (int f = 0; f < n_frames; ++f) {
        const Location loc = locate(cfg, f);
        by_slot.emplace(f, FrameEvent{f, f, Stage::convert_mark, loc.region, loc.buffer});
        by_slot.emplace(track_slot(cfg, f),
                        FrameEvent{track_slot(cfg, f), f, Stage::track, loc.region, loc.buffer});
        by_slot.emplace(f + latency,
                        FrameEvent{f + latency, f, Stage::display, loc.region, loc.buffer});
    }
    report.slots = by_slot.empty() ? 0 : std::prev(by_slot.end())->first + 1;

    std::map<std::pair<int, int>, int> owner;  // buffer -> frame it holds
    int first_display = -1;
    int last_display = -1;
    int displays = 0;
    for (int slot = 0; slot < report.slots; ++slot) {
        const auto [begin, end] = by_slot.equal_range(slot);
        std::vector<FrameEvent> events;
        for (auto it = begin; it != end; ++it) events.push_back(it->second);
        std::stable_sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
            return a.stage != b.stage ? a.stage < b.stage : a.frame < b.frame;
        });

        std::set<std::pair<int, int>> written;
        std::set<int> written_groups;
        for (const auto& e : events) {
            if (e.stage != Stage::convert_mark) continue;
            written.insert({e.region, e.buffer});
            written_groups.insert(locate(cfg, e.frame).group);
        }
        bool group_conflict = false;
        for (const auto& e : events) {
            if (e.stage == Stage::convert_mark) continue;
            const std::pair<int, int> buf{e.region, e.buffer};
            const auto held = owner.find(buf);
            const bool stale = held == owner.end() || held->second != e.frame;
            if (written.count(buf) || stale) ++report.hazards;
            if (e.stage == Stage::display) {
                if (written_groups.count(locate(cfg, e.frame).group)) group_conflict = true;
                if (first_display < 0) first_display = slot;
                last_display = slot;
                ++displays;
            }
        }
        if (group_conflict) ++report.group_conflicts;
        for (const auto& e : events) {
            if (e.stage == Stage::convert_mark) owner[{e.region, e.buffer}] = e.frame;
        }
        report.events.insert(report.events.end(), events.begin(), events.end());
    }
    if (displays > 0) {
        report.steady_throughput = double(displays) / double(last_display - first_display + 1);
    }
    report.bandwidth = aggregate_bandwidth(cfg);
    return report;
}

SimReport simulate(const SimConfig& cfg, int n_frames) {
    cfg.validate();
    return simulate_unchecked(cfg, n_frames);
}

Bandwidth aggregate_bandwidth(const SimConfig& cfg) {
    Bandwidth bw;
    bw.budget = cfg.max_bandwidth;
    const double pixels_per_s = double(cfg.width) * double(cfg.height) * cfg.fps;
    for (const auto& ch : cfg.channels) {
        const double gbps = pixels_per_s * ch.bits_per_pixel * cfg.overhead / 1e9;
        bw.channels.push_back({ch.name, ch.direction, gbps});
        bw.total += gbps;
    }
    bw.within_budget = bw.total <= cfg.max_bandwidth;
    return bw;
}

nlohmann::json to_json(const SimReport& report, const SimConfig& cfg) {
    nlohmann::json j;
    j["config"] = {
        {"width", cfg.width},
        {"height", cfg.height},
        {"fps", cfg.fps},
        {"regions", cfg.regions},
        {"frames_per_region", cfg.frames_per_region},
        {"group_size", cfg.group_size},
        {"group_tracking", cfg.group_tracking},
        {"max_bandwidth_gbps", cfg.max_bandwidth},
        {"overhead", cfg.overhead},
        {"clock_mhz", cfg.clock_mhz},
        {"channels", format_channels(cfg.channels)},
    };
    j["slots"] = report.slots;
    j["display_latency"] = report.display_latency;
    j["warmup_slots"] = report.warmup_slots;
    j["steady_throughput"] = report.steady_throughput;
    j["hazards"] = report.hazards;
    j["group_conflicts"] = report.group_conflicts;
    auto& bw = j["bandwidth"];
    bw["total_gbps"] = report.bandwidth.total;
    bw["budget_gbps"] = report.bandwidth.budget;
    bw["within_budget"] = report.bandwidth.within_budget;
    bw["channels"] = nlohmann::json::array();
    for (const auto& ch : report.bandwidth.channels) {
        bw["channels"].push_back(
            {{"name", ch.name}, {"direction", to_string(ch.direction)}, {"gbps", ch.gbit_per_s}});
    }
    j["events"] = nlohmann::json::array();
    for (const auto& e : report.events) {
        j["events"].push_back({{"slot", e.slot},
                               {"frame", e.frame},
                               {"stage", to_string(e.stage)},
                               {"region", e.region},
                               {"buffer", e.buffer}});
    }
    return j;
}

std::string render_table(const SimReport& report) {
    std::map<int, std::map<Stage, std::vector<std::string>>> cells;
    for (const auto& e : report.events) {
        std::ostringstream c;
        c << 'F' << e.frame << " r" << e.region << 'b' << e.buffer;
        cells[e.slot][e.stage].push_back(c.str());
    }
    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v) s += (s.empty() ? "" : " ") + x;
        return s.empty() ? std::string("-") : s;
    };
    std::ostringstream os;
    os << std::left << std::setw(6) << "slot" << std::setw(22) << "CONVERT_MARK" << std::setw(22)
       << "TRACK" << "DISPLAY\n";
    for (int slot = 0; slot < report.slots; ++slot) {
        auto& row = cells[slot];
        os << std::setw(6) << slot << std::setw(22) << join(row[Stage::convert_mark])
           << std::setw(22) << join(row[Stage::track]) << join(row[Stage::display]) << '\n';
    }
    os << std::fixed << std::setprecision(3);
    os << "\ndisplay latency: " << report.display_latency << " slots\n"
       << "steady throughput: " << report.steady_throughput << " frames/slot\n"
       << "hazards: " << report.hazards << ", group conflicts: " << report.group_conflicts << '\n';
    for (const auto& ch : report.bandwidth.channels) {
        os << "  " << std::setw(16) << ch.name << std::setw(6) << to_string(ch.direction)
           << ch.gbit_per_s << " Gbit/s\n";
    }
    os << "total bandwidth: " << report.bandwidth.total << " / " << report.bandwidth.budget
       << " Gbit/s" << (report.bandwidth.within_budget ? "" : "  OVER BUDGET") << '\n';
    return os.str();
}

}  // namespace camtrack::sim
