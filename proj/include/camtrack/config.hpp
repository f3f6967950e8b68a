#pragma once

#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "camtrack/bench.hpp"
#include "camtrack/imaging.hpp"
#include "camtrack/pipeline_sim.hpp"
#include "camtrack/tracker.hpp"

namespace camtrack {

/// Every tunable of the toolkit. Each field is reachable through exactly one
/// config key, and each key through exactly one command-line flag.
struct AppConfig {
    TrackerConfig tracker;
    ColorMatrix matrix = ColorMatrix::bt709_limited;
    sim::SimConfig sim;
    int sim_n_frames = 10;
    std::set<bench::Format> formats{bench::Format::csv, bench::Format::json, bench::Format::svg};

    /// Checks every module invariant; throws Error(config).
    void validate() const;
};

struct ConfigKey {
    std::string key;    // "classifier.h_t"
    std::string flag;   // "--classifier.h_t" or a short alias such as "--workers"
    std::string help;
    std::function<void(AppConfig&, std::string_view)> set;
    std::function<std::string(const AppConfig&)> get;
};

[[nodiscard]] const std::vector<ConfigKey>& config_keys();
[[nodiscard]] const ConfigKey* find_config_key(std::string_view key);

/// Sets one key from its textual value. Unknown keys and unparsable values
/// throw Error(config).
void set_config_value(AppConfig& cfg, std::string_view key, std::string_view value);

/// Parses "key = value" lines; "[section]" headers prefix the keys that follow.
/// '#' and ';' start comments. Values are validated after the whole file is
/// applied on top of `base`.
[[nodiscard]] AppConfig parse_config(std::string_view text, AppConfig base = {},
                                     std::string_view origin = "<config>");
[[nodiscard]] AppConfig load_config_file(const std::filesystem::path& path, AppConfig base = {});

/// Serializes every key in a form parse_config reads back.
[[nodiscard]] std::string dump_config(const AppConfig& cfg);

}  // namespace camtrack
