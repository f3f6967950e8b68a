#include "camtrack/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace camtrack {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorKind::config, what); }

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

int parse_int(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    int v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) {
        config_error(std::string(key) + ": expected an integer, got '" + s + "'");
    }
    return v;
}

double parse_double(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    double v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) {
        config_error(std::string(key) + ": expected a number, got '" + s + "'");
    }
    return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
    const std::string s = trim(text);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    config_error(std::string(key) + ": expected true or false, got '" + s + "'");
}

std::string fmt(double v) {
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}
std::string fmt(int v) { return std::to_string(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

template <typename Field>
ConfigKey int_key(std::string key, std::string help, Field field) {
    return {key, "--" + key, std::move(help),
            [field, key](AppConfig& c, std::string_view v) { field(c) = parse_int(key, v); },
            [field](const AppConfig& c) { return fmt(field(c)); }};
}
template <typename Field>
ConfigKey double_key(std::string key, std::string help, Field field) {
    return {key, "--" + key, std::move(help),
            [field, key](AppConfig& c, std::string_view v) { field(c) = parse_double(key, v); },
            [field](const AppConfig& c) { return fmt(field(c)); }};
}
template <typename Field>
ConfigKey bool_key(std::string key, std::string help, Field field) {
    return {key, "--" + key, std::move(help),
            [field, key](AppConfig& c, std::string_view v) { field(c) = parse_bool(key, v); },
            [field](const AppConfig& c) { return fmt(field(c)); }};
}
template <typename Field>
ConfigKey weight_key(std::string key, std::string help, Field field) {
    return {key, "--" + key, std::move(help),
            [field, key](AppConfig& c, std::string_view v) {
                const double w = parse_double(key, v);
                if (!(w >= 0.0 && w <= 1.0)) config_error(key + ": weight must be in [0, 1]");
                field(c) = Q8Weight::from_double(w);
            },
            [field](const AppConfig& c) { return fmt(field(c).to_double()); }};
}

std::vector<ConfigKey> build_keys() {
    std::vector<ConfigKey> k;
    // classifier
    k.push_back(int_key("classifier.h_t", "hue threshold, circular 8-bit distance",
                        [](auto& c) -> auto& { return c.tracker.classifier.h_t; }));
    k.push_back(int_key("classifier.s_t", "saturation threshold",
                        [](auto& c) -> auto& { return c.tracker.classifier.s_t; }));
    k.push_back(int_key("classifier.v_t", "value threshold",
                        [](auto& c) -> auto& { return c.tracker.classifier.v_t; }));
    k.push_back(int_key("classifier.a_t", "weighted-distance threshold",
                        [](auto& c) -> auto& { return c.tracker.classifier.a_t; }));
    k.push_back(weight_key("classifier.alpha", "hue weight (Q0.8)",
                           [](auto& c) -> auto& { return c.tracker.classifier.alpha; }));
    k.push_back(weight_key("classifier.beta", "saturation weight (Q0.8)",
                           [](auto& c) -> auto& { return c.tracker.classifier.beta; }));
    k.push_back(weight_key("classifier.gamma", "value weight (Q0.8)",
                           [](auto& c) -> auto& { return c.tracker.classifier.gamma; }));
    k.push_back(bool_key("classifier.mean_over_mask",
                         "update the color model from classified pixels only",
                         [](auto& c) -> auto& { return c.tracker.mean_over_mask; }));
    // kalman
    k.push_back(double_key("kalman.q", "process noise (white acceleration)",
                           [](auto& c) -> auto& { return c.tracker.kalman.q; }));
    k.push_back(double_key("kalman.r", "measurement noise variance, px^2",
                           [](auto& c) -> auto& { return c.tracker.kalman.r; }));
    k.push_back(double_key("kalman.p0", "initial state variance",
                           [](auto& c) -> auto& { return c.tracker.kalman.p0; }));
    // tracker
    k.push_back(int_key("tracker.max_iters", "meanshift iteration limit",
                        [](auto& c) -> auto& { return c.tracker.max_iters; }));
    k.push_back(double_key("tracker.converge_eps", "meanshift convergence shift, px",
                           [](auto& c) -> auto& { return c.tracker.converge_eps; }));
    k.push_back(double_key("tracker.size_ratio_t", "area ratio that triggers the Kalman fallback",
                           [](auto& c) -> auto& { return c.tracker.size_ratio_t; }));
    {
        auto w = int_key("tracker.workers", "worker threads for classification and moments",
                         [](auto& c) -> auto& { return c.tracker.workers; });
        w.flag = "--workers";
        k.push_back(std::move(w));
    }
    k.push_back(double_key("tracker.search_margin", "search window size relative to the box",
                           [](auto& c) -> auto& { return c.tracker.search_margin; }));
    k.push_back({"tracker.search_start", "--tracker.search_start",
                 "meanshift start point: kalman or previous",
                 [](AppConfig& c, std::string_view v) {
                     const auto s = parse_search_start(trim(v));
                     if (!s) config_error("tracker.search_start: expected kalman or previous");
                     c.tracker.search_start = *s;
                 },
                 [](const AppConfig& c) { return std::string(to_string(c.tracker.search_start)); }});
    // moments
    k.push_back({"moments.kernel", "--moments.kernel", "weight kernel: linear, epanechnikov, uniform",
                 [](AppConfig& c, std::string_view v) {
                     const auto s = parse_kernel_shape(trim(v));
                     if (!s) config_error("moments.kernel: expected linear, epanechnikov or uniform");
                     c.tracker.kernel = *s;
                 },
                 [](const AppConfig& c) { return std::string(to_string(c.tracker.kernel)); }});
    k.push_back(double_key("moments.radius_factor", "kernel radius / search-window diagonal",
                           [](auto& c) -> auto& { return c.tracker.radius_factor; }));
    k.push_back(double_key("moments.size_cal", "window size calibration factor",
                           [](auto& c) -> auto& { return c.tracker.size_cal; }));
    // imaging
    k.push_back({"imaging.matrix", "--imaging.matrix", "YCbCr matrix: bt709 or bt601 (limited range)",
                 [](AppConfig& c, std::string_view v) {
                     const auto m = parse_color_matrix(trim(v));
                     if (!m) config_error("imaging.matrix: expected bt709 or bt601");
                     c.matrix = *m;
                 },
                 [](const AppConfig& c) { return std::string(to_string(c.matrix)); }});
    // sim
    k.push_back(int_key("sim.width", "frame width, px", [](auto& c) -> auto& { return c.sim.width; }));
    k.push_back(int_key("sim.height", "frame height, px", [](auto& c) -> auto& { return c.sim.height; }));
    k.push_back(double_key("sim.fps", "frame rate", [](auto& c) -> auto& { return c.sim.fps; }));
    k.push_back(int_key("sim.regions", "frame-buffer regions",
                        [](auto& c) -> auto& { return c.sim.regions; }));
    k.push_back(int_key("sim.frames_per_region", "frames stored per region",
                        [](auto& c) -> auto& { return c.sim.frames_per_region; }));
    k.push_back(int_key("sim.group_size", "frames per ping-pong group",
                        [](auto& c) -> auto& { return c.sim.group_size; }));
    k.push_back(double_key("sim.max_bandwidth", "memory bandwidth budget, Gbit/s",
                           [](auto& c) -> auto& { return c.sim.max_bandwidth; }));
    k.push_back(double_key("sim.overhead", "multiplier on raw channel traffic",
                           [](auto& c) -> auto& { return c.sim.overhead; }));
    k.push_back(bool_key("sim.group_tracking", "track a whole group per slot",
                         [](auto& c) -> auto& { return c.sim.group_tracking; }));
    k.push_back(double_key("sim.clock_mhz", "system clock, recorded in the report",
                           [](auto& c) -> auto& { return c.sim.clock_mhz; }));
    k.push_back({"sim.channels", "--sim.channels",
                 "memory channels as name:read|write:bpp, comma separated",
                 [](AppConfig& c, std::string_view v) {
                     try {
                         c.sim.channels = sim::parse_channels(v);
                     } catch (const Error& e) {
                         config_error(std::string("sim.channels: ") + e.what());
                     }
                 },
                 [](const AppConfig& c) { return sim::format_channels(c.sim.channels); }});
    {
        auto n = int_key("sim.n_frames", "frames to simulate",
                         [](auto& c) -> auto& { return c.sim_n_frames; });
        n.flag = "--n-frames";
        k.push_back(std::move(n));
    }
    // bench
    k.push_back({"bench.formats", "--formats", "report formats: csv,json,svg or none",
                 [](AppConfig& c, std::string_view v) {
                     try {
                         c.formats = bench::parse_formats(v);
                     } catch (const Error& e) {
                         config_error(std::string("bench.formats: ") + e.what());
                     }
                 },
                 [](const AppConfig& c) { return bench::format_formats(c.formats); }});
    return k;
}

}  // namespace

void AppConfig::validate() const {
    try {
        tracker.validate();
        sim.validate();
        if (sim_n_frames < 3) config_error("sim.n_frames must be >= 3");
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::config) throw;
        config_error(e.what());
    }
}

const std::vector<ConfigKey>& config_keys() {
    static const std::vector<ConfigKey> keys = build_keys();
    return keys;
}

const ConfigKey* find_config_key(std::string_view key) {
    for (const auto& k : config_keys()) {
        if (k.key == key) return &k;
    }
    return nullptr;
}

void set_config_value(AppConfig& cfg, std::string_view key, std::string_view value) {
    const ConfigKey* k = find_config_key(key);
    if (!k) config_error("unknown config key '" + std::string(key) + "'");
    k->set(cfg, value);
}

AppConfig parse_config(std::string_view text, AppConfig base, std::string_view origin) {
    std::istringstream in{std::string(text)};
    std::string line;
    std::string section;
    int line_no = 0;
    std::map<std::string, int> seen;
    while (std::getline(in, line)) {
        ++line_no;
        const auto where = [&] { return std::string(origin) + ":" + std::to_string(line_no) + ": "; };
        const auto comment = line.find_first_of("#;");
        std::string body = trim(comment == std::string::npos ? line : line.substr(0, comment));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') config_error(where() + "unterminated section header");
            section = trim(std::string_view(body).substr(1, body.size() - 2));
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) config_error(where() + "expected key = value");
        std::string key = trim(std::string_view(body).substr(0, eq));
        std::string value = trim(std::string_view(body).substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        if (!section.empty()) key = section + "." + key;
        if (auto [it, fresh] = seen.emplace(key, line_no); !fresh) {
            config_error(where() + "duplicate key '" + key + "' (first set on line " +
                         std::to_string(it->second) + ")");
        }
        try {
            set_config_value(base, key, value);
        } catch (const Error& e) {
            config_error(where() + e.what());
        }
    }
    base.validate();
    return base;
}

AppConfig load_config_file(const std::filesystem::path& path, AppConfig base) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, path.string() + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base), path.string());
}

std::string dump_config(const AppConfig& cfg) {
    std::ostringstream os;
    std::string section;
    for (const auto& k : config_keys()) {
        const auto dot = k.key.find('.');
        const std::string sec = k.key.substr(0, dot);
        if (sec != section) {
            os << (section.empty() ? "" : "\n") << '[' << sec << "]\n";
            section = sec;
        }
        os << k.key.substr(dot + 1) << " = " << k.get(cfg) << '\n';
    }
    return os.str();
}

}  // namespace camtrack
