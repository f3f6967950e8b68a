#include "camtrack/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>

#include "camtrack/bench.hpp"
#include "camtrack/config.hpp"
#include "camtrack/imaging.hpp"
#include "camtrack/pipeline_sim.hpp"
#include "camtrack/synthetic.hpp"
#include "camtrack/tracker.hpp"

namespace camtrack::cli {

namespace fs = std::filesystem;

namespace {

/// A failure caused by how the program was invoked; exits with kUsage.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Rect parse_rect_flag(const std::string& flag, const std::string& text) {
    std::istringstream in(text);
    int v[4];
    char sep[3];
    if (!(in >> v[0] >> sep[0] >> v[1] >> sep[1] >> v[2] >> sep[2] >> v[3]) || sep[0] != ',' ||
        sep[1] != ',' || sep[2] != ',' || !(in >> std::ws).eof()) {
        throw UsageError(flag + ": expected x,y,w,h, got '" + text + "'");
    }
    if (v[2] < 1 || v[3] < 1) throw UsageError(flag + ": width and height must be >= 1");
    return Rect{v[0], v[1], v[2], v[3]};
}

/// Config-key flags shared by the subcommands, applied after an optional
/// --config file so that flags win.
class ConfigFlags {
public:
    ConfigFlags(CLI::App& app, const std::vector<std::string>& sections) {
        app.add_option("--config", config_path_, "config file (key = value, [section] headers)");
        for (const auto& key : config_keys()) {
            const auto section = key.key.substr(0, key.key.find('.'));
            if (std::find(sections.begin(), sections.end(), section) == sections.end()) continue;
            std::string names = key.flag;
            if (key.flag != "--" + key.key) names += ",--" + key.key;
            auto* opt = app.add_option(names, values_[key.key], key.help + " [" + key.key + "]");
            opt->default_str(key.get(AppConfig{}));
            options_[key.key] = opt;
        }
    }

    [[nodiscard]] AppConfig resolve() const {
        AppConfig cfg;
        if (!config_path_.empty()) cfg = load_config_file(config_path_);
        for (const auto& [key, opt] : options_) {
            if (opt->count() == 0) continue;
            try {
                set_config_value(cfg, key, values_.at(key));
            } catch (const Error& e) {
                throw UsageError(opt->get_name() + ": " + e.what());
            }
        }
        try {
            cfg.validate();
        } catch (const Error& e) {
            throw UsageError(e.what());
        }
        return cfg;
    }

private:
    std::string config_path_;
    std::map<std::string, std::string> values_;
    std::map<std::string, CLI::Option*> options_;
};

// ---------------------------------------------------------------------------

struct TrackArgs {
    std::string input;
    std::string kind = "images";
    int width = 0;
    int height = 0;
    std::string init;
    std::string output;
    std::string debug_masks;
};

int cmd_track(const TrackArgs& a, const AppConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto kind = parse_sequence_kind(a.kind);
    if (!kind) throw UsageError("--kind: expected images or raw-ycbcr");
    const Rect init_box = parse_rect_flag("--init", a.init);
    const Sequence seq = load_sequence(a.input, *kind, RawGeometry{a.width, a.height});

    std::ofstream file;
    if (!a.output.empty()) {
        file.open(a.output);
        if (!file) throw Error(ErrorKind::io, a.output + ": cannot open for writing");
    }
    std::ostream& sink = a.output.empty() ? out : file;
    if (!a.debug_masks.empty()) fs::create_directories(a.debug_masks);

    const HsvFrame first = seq.read_hsv(0, cfg.matrix);
    if (!clamp_to_frame(init_box, first.width(), first.height())) {
        std::ostringstream msg;
        msg << "--init: box " << init_box << " lies outside the " << first.width() << 'x'
            << first.height() << " frame";
        throw UsageError(msg.str());
    }
    TrackerState state = init(first, init_box, cfg.tracker);
    auto emit = [&](int index, const Rect& r, TrackMode mode, int iterations) {
        sink << index << ',' << r.x << ',' << r.y << ',' << r.w << ',' << r.h << ','
             << to_string(mode) << ',' << iterations << '\n';
    };
    emit(0, state.box, state.mode, 0);
    BinaryMask mask;
    for (std::size_t i = 1; i < seq.size(); ++i) {
        auto [next, o] = track_frame(state, seq.read_hsv(i, cfg.matrix), cfg.tracker,
                                     a.debug_masks.empty() ? nullptr : &mask);
        state = std::move(next);
        emit(int(i), o.box, o.mode, o.iterations);
        if (!a.debug_masks.empty()) {
            std::ostringstream name;
            name << "mask_" << std::setw(5) << std::setfill('0') << i << ".pbm";
            write_pbm(fs::path(a.debug_masks) / name.str(), mask);
        }
    }
    sink.flush();
    if (!sink) throw Error(ErrorKind::io, "failed writing track results");
    err << "tracked " << seq.size() << " frames\n";
    return kSuccess;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
    std::string manifest;
    std::string output = "bench_out";
};

struct ManifestEntry {
    std::string name;
    fs::path sequence;
    fs::path truth;
    std::optional<Rect> init;
};

int cmd_bench(const BenchArgs& a, const AppConfig& cfg, std::ostream& out, std::ostream& err) {
    std::ifstream in(a.manifest);
    if (!in) throw Error(ErrorKind::io, a.manifest + ": cannot open manifest");
    const fs::path base = fs::path(a.manifest).parent_path();
    auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

    std::vector<ManifestEntry> entries;
    int problems = 0;
    std::string line;
    int line_no = 0;
    std::map<std::string, int> names;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::vector<std::string> fields;
        for (std::string f; ls >> f;) fields.push_back(f);
        if (fields.empty()) continue;
        if (fields.size() < 2 || fields.size() > 3) {
            err << "warning: " << a.manifest << ':' << line_no
                << ": expected '<sequence-dir> <groundtruth> [x,y,w,h]', skipped\n";
            ++problems;
            continue;
        }
        ManifestEntry e;
        e.sequence = resolve(fields[0]);
        e.truth = resolve(fields[1]);
        if (fields.size() == 3) {
            try {
                e.init = parse_rect_flag("init rect", fields[2]);
            } catch (const UsageError& ex) {
                err << "warning: " << a.manifest << ':' << line_no << ": " << ex.what()
                    << ", skipped\n";
                ++problems;
                continue;
            }
        }
        e.name = e.sequence.filename().string();
        if (e.name.empty()) e.name = e.sequence.parent_path().filename().string();
        if (const int n = names[e.name]++; n > 0) e.name += "_" + std::to_string(n + 1);
        entries.push_back(std::move(e));
    }
    if (entries.empty()) {
        throw Error(ErrorKind::io, a.manifest + ": manifest lists no usable sequences");
    }

    std::vector<bench::BenchSequence> loaded;
    std::vector<bench::SequenceResult> load_failures;
    for (const auto& e : entries) {
        try {
            const Sequence seq = load_sequence(e.sequence, SequenceKind::numbered_images);
            auto truth = bench::load_ground_truth(e.truth);
            const Rect init_box = e.init.value_or(truth.front());
            loaded.push_back(bench::load_bench_sequence(e.name, seq, std::move(truth), init_box,
                                                        cfg.matrix));
        } catch (const Error& ex) {
            err << "warning: " << e.name << ": " << ex.what() << '\n';
            bench::SequenceResult failed;
            failed.name = e.name;
            failed.error = ex.what();
            load_failures.push_back(std::move(failed));
        }
    }

    bench::BenchReport report;
    if (!loaded.empty()) report = bench::run_benchmark(loaded, cfg.tracker);
    for (auto& f : load_failures) {
        report.sequences.push_back(std::move(f));
        ++report.failed;
    }
    const auto files = bench::emit_report(report, cfg.formats, a.output);

    out << std::fixed << std::setprecision(3);
    for (const auto& s : report.sequences) {
        if (s.ok) {
            out << s.name << ": AUC " << s.success.auc << ", precision@20px "
                << s.precision.at_20px << ", " << std::setprecision(1) << s.mean_fps << " FPS\n"
                << std::setprecision(3);
        } else {
            out << s.name << ": FAILED (" << s.error << ")\n";
        }
    }
    out << "mean: AUC " << report.mean_auc << ", precision@20px " << report.mean_precision_20px
        << ", " << std::setprecision(1) << report.mean_fps << " FPS\n";
    for (const auto& f : files) err << "wrote " << f.string() << '\n';
    return report.failed > 0 || problems > 0 ? kDataError : kSuccess;
}

// ---------------------------------------------------------------------------

int cmd_sim(const std::string& output, const AppConfig& cfg, std::ostream& out, std::ostream& err) {
    const sim::SimReport report = sim::simulate(cfg.sim, cfg.sim_n_frames);
    out << sim::render_table(report);
    if (!output.empty()) {
        std::ofstream f(output);
        if (!f) throw Error(ErrorKind::io, output + ": cannot open for writing");
        f << sim::to_json(report, cfg.sim).dump(2) << '\n';
        if (!f) throw Error(ErrorKind::io, output + ": write failed");
        err << "wrote " << output << '\n';
    }
    if (!report.bandwidth.within_budget) {
        err << "error: aggregate bandwidth exceeds the " << cfg.sim.max_bandwidth
            << " Gbit/s budget\n";
        return kDataError;
    }
    return report.hazards == 0 ? kSuccess : kDataError;
}

// ---------------------------------------------------------------------------

struct ConvertArgs {
    std::string input;
    int width = 0;
    int height = 0;
    std::string output;
    std::string to = "rgb";
};

int cmd_convert(const ConvertArgs& a, const AppConfig& cfg, std::ostream& out) {
    if (a.to != "rgb" && a.to != "hsv") throw UsageError("--to: expected rgb or hsv");
    const Sequence seq =
        load_sequence(a.input, SequenceKind::raw_ycbcr, RawGeometry{a.width, a.height});
    fs::create_directories(a.output);
    for (std::size_t i = 0; i < seq.size(); ++i) {
        RgbFrame frame = seq.read_rgb(i, cfg.matrix);
        if (a.to == "hsv") {
            // HSV planes stored in the R, G, B slots for inspection.
            const HsvFrame hsv = rgb_to_hsv(frame);
            frame = RgbFrame(hsv.width(), hsv.height(),
                             std::vector<std::uint8_t>(hsv.data().begin(), hsv.data().end()));
        }
        std::ostringstream name;
        name << "frame" << std::setw(5) << std::setfill('0') << i + 1 << ".ppm";
        write_ppm(fs::path(a.output) / name.str(), frame);
    }
    out << "converted " << seq.size() << " frames to " << a.output << '\n';
    return kSuccess;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string output;
    int frames = 100;
    int width = 640;
    int height = 480;
    double radius = 20.0;
    std::string shape = "disk";
    double vx = 3.0;
    double vy = 0.0;
    int occlude_first = -1;
    int occlude_length = 10;
    int noise = 0;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
    synth::Scene scene;
    scene.frames = a.frames;
    scene.width = a.width;
    scene.height = a.height;
    scene.radius = a.radius;
    scene.velocity = {a.vx, a.vy};
    scene.noise = a.noise;
    scene.start = {std::max(a.radius + 10.0, a.width * 0.15), a.height * 0.5};
    if (a.shape == "square") {
        scene.shape = synth::Shape::square;
    } else if (a.shape != "disk") {
        throw UsageError("--shape: expected disk or square");
    }
    if (a.occlude_first >= 0) {
        scene.occlusion_first = a.occlude_first;
        scene.occlusion_length = a.occlude_length;
    }
    const auto seq = synth::generate(scene);
    const fs::path dir = a.output;
    fs::create_directories(dir / "img");
    std::ofstream gt(dir / "groundtruth_rect.txt");
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        std::ostringstream name;
        name << std::setw(4) << std::setfill('0') << i + 1 << ".ppm";
        write_ppm(dir / "img" / name.str(), seq.frames[i]);
        const Rect& r = seq.truth[i];
        gt << r.x + 1 << ',' << r.y + 1 << ',' << r.w << ',' << r.h << '\n';
    }
    std::ofstream manifest(dir / "manifest.txt");
    manifest << "img groundtruth_rect.txt\n";
    if (!gt || !manifest) throw Error(ErrorKind::io, dir.string() + ": write failed");
    const Rect& r0 = seq.truth.front();
    out << "wrote " << seq.frames.size() << " frames to " << (dir / "img").string()
        << "; first box " << r0.x << ',' << r0.y << ',' << r0.w << ',' << r0.h << '\n';
    return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Binary-classifier Camshift tracker with Kalman fallback, OTB-style benchmark "
                 "and frame-pipeline simulator",
                 "camtrack"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "show help for every subcommand");

    const std::vector<std::string> tracking_sections{"classifier", "kalman", "tracker", "moments",
                                                     "imaging"};

    TrackArgs track_args;
    auto* track = app.add_subcommand("track", "track one target through a sequence");
    track->add_option("--input", track_args.input, "image directory or raw YCbCr 4:2:2 file")
        ->required();
    track->add_option("--kind", track_args.kind, "images or raw-ycbcr")->capture_default_str();
    track->add_option("--width", track_args.width, "frame width for raw input");
    track->add_option("--height", track_args.height, "frame height for raw input");
    track->add_option("--init", track_args.init, "initial box x,y,w,h (0-based pixels)")->required();
    track->add_option("--output", track_args.output, "result file (default: standard output)");
    track->add_option("--debug-masks", track_args.debug_masks, "directory for per-frame PBM masks");
    ConfigFlags track_cfg(*track, tracking_sections);

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "one-pass evaluation over a manifest of sequences");
    bench_cmd->add_option("--manifest", bench_args.manifest,
                          "lines of '<sequence-dir> <groundtruth> [x,y,w,h]'")
        ->required();
    bench_cmd->add_option("--output", bench_args.output, "report directory")->capture_default_str();
    auto bench_sections = tracking_sections;
    bench_sections.push_back("bench");
    ConfigFlags bench_cfg(*bench_cmd, bench_sections);

    std::string sim_output;
    auto* sim_cmd = app.add_subcommand("sim", "simulate the frame-buffer pipeline schedule");
    sim_cmd->add_option("--output", sim_output, "JSON report path");
    ConfigFlags sim_cfg(*sim_cmd, {"sim"});

    ConvertArgs convert_args;
    auto* convert = app.add_subcommand("convert", "convert a raw YCbCr 4:2:2 file to PPM frames");
    convert->add_option("--input", convert_args.input, "raw YCbCr 4:2:2 file")->required();
    convert->add_option("--width", convert_args.width, "frame width")->required();
    convert->add_option("--height", convert_args.height, "frame height")->required();
    convert->add_option("--output", convert_args.output, "output directory")->required();
    convert->add_option("--to", convert_args.to, "rgb or hsv")->capture_default_str();
    ConfigFlags convert_cfg(*convert, {"imaging"});

    SynthArgs synth_args;
    auto* synth_cmd = app.add_subcommand("synth", "write a synthetic moving-target sequence");
    synth_cmd->add_option("--output", synth_args.output, "output directory")->required();
    synth_cmd->add_option("--frames", synth_args.frames)->capture_default_str();
    synth_cmd->add_option("--width", synth_args.width)->capture_default_str();
    synth_cmd->add_option("--height", synth_args.height)->capture_default_str();
    synth_cmd->add_option("--radius", synth_args.radius)->capture_default_str();
    synth_cmd->add_option("--shape", synth_args.shape, "disk or square")->capture_default_str();
    synth_cmd->add_option("--vx", synth_args.vx, "px per frame")->capture_default_str();
    synth_cmd->add_option("--vy", synth_args.vy, "px per frame")->capture_default_str();
    synth_cmd->add_option("--occlude-first", synth_args.occlude_first, "first hidden frame");
    synth_cmd->add_option("--occlude-length", synth_args.occlude_length)->capture_default_str();
    synth_cmd->add_option("--noise", synth_args.noise, "background noise amplitude")
        ->capture_default_str();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(int(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    try {
        if (*track) return cmd_track(track_args, track_cfg.resolve(), out, err);
        if (*bench_cmd) return cmd_bench(bench_args, bench_cfg.resolve(), out, err);
        if (*sim_cmd) return cmd_sim(sim_output, sim_cfg.resolve(), out, err);
        if (*convert) return cmd_convert(convert_args, convert_cfg.resolve(), out);
        if (*synth_cmd) return cmd_synth(synth_args, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::config ? kUsage : kDataError;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kUsage;
}

}  // namespace camtrack::cli
