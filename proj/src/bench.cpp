#include "camtrack/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace camtrack::bench {

double iou(const Rect& a, const Rect& b) {
    const std::int64_t inter = intersect(a, b).value_or(Rect{}).area();
    const std::int64_t uni = a.area() + b.area() - inter;
    return uni > 0 ? double(inter) / double(uni) : 0.0;
}

double center_error(const Rect& a, const Rect& b) {
    const Point2d ca = a.center();
    const Point2d cb = b.center();
    return std::hypot(ca.x - cb.x, ca.y - cb.y);
}

std::vector<double> default_success_thresholds() {
    std::vector<double> t;
    for (int i = 0; i <= 20; ++i) t.push_back(i * 0.05);
    return t;
}

std::vector<double> default_precision_thresholds() {
    std::vector<double> t;
    for (int i = 0; i <= 50; ++i) t.push_back(i);
    return t;
}

namespace {

void check_lengths(const std::vector<Rect>& results, const GroundTruth& gt) {
    if (results.size() != gt.size()) {
        throw Error(ErrorKind::length_mismatch, "result length " + std::to_string(results.size()) +
                                                    " != ground truth length " +
                                                    std::to_string(gt.size()));
    }
}

template <typename Pass>
Curve make_curve(const std::vector<double>& per_frame, const std::vector<double>& thresholds,
                 Pass pass) {
    if (thresholds.empty()) throw Error(ErrorKind::invalid_parameter, "empty threshold grid");
    Curve c;
    c.thresholds = thresholds;
    for (double t : thresholds) {
        const auto n = std::count_if(per_frame.begin(), per_frame.end(),
                                     [&](double v) { return pass(v, t); });
        c.values.push_back(per_frame.empty() ? 0.0 : double(n) / double(per_frame.size()));
    }
    c.auc = std::accumulate(c.values.begin(), c.values.end(), 0.0) / double(c.values.size());
    return c;
}

}  // namespace

Curve success_curve(const std::vector<Rect>& results, const GroundTruth& gt,
                    const std::vector<double>& thresholds) {
    check_lengths(results, gt);
    std::vector<double> overlaps;
    for (std::size_t i = 0; i < results.size(); ++i) overlaps.push_back(iou(results[i], gt[i]));
    return make_curve(overlaps, thresholds, [](double v, double t) { return v > t; });
}

PrecisionResult precision_curve(const std::vector<Rect>& results, const GroundTruth& gt,
                                 const std::vector<double>& thresholds) {
    check_lengths(results, gt);
    std::vector<double> errors;
    for (std::size_t i = 0; i < results.size(); ++i) {
        errors.push_back(center_error(results[i], gt[i]));
    }
    auto within = [](double v, double t) { return v <= t; };
    PrecisionResult r;
    r.curve = make_curve(errors, thresholds, within);
    r.at_20px = make_curve(errors, {kPrecisionAtPx}, within).values.front();
    return r;
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::io, path.string() + ": cannot open ground truth");
    GroundTruth gt;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::replace_if(line.begin(), line.end(),
                        [](char c) { return c == ',' || c == '\t' || c == '\r'; }, ' ');
        if (line.find_first_not_of(' ') == std::string::npos) continue;
        std::istringstream ls(line);
        double v[4];
        if (!(ls >> v[0] >> v[1] >> v[2] >> v[3])) {
            throw Error(ErrorKind::io, path.string() + ":" + std::to_string(line_no) +
                                           ": expected x,y,w,h");
        }
        gt.push_back(Rect{int(std::lround(v[0])) - 1, int(std::lround(v[1])) - 1,
                          int(std::lround(v[2])), int(std::lround(v[3]))});
    }
    if (gt.empty()) throw Error(ErrorKind::io, path.string() + ": no ground-truth boxes");
    return gt;
}

BenchSequence load_bench_sequence(std::string name, const Sequence& seq, GroundTruth truth,
                                  Rect init, ColorMatrix matrix) {
    if (truth.size() != seq.size()) {
        throw Error(ErrorKind::length_mismatch,
                    name + ": " + std::to_string(seq.size()) + " frames but " +
                        std::to_string(truth.size()) + " ground-truth boxes");
    }
    BenchSequence b{std::move(name), {}, std::move(truth), init};
    b.frames.reserve(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) b.frames.push_back(seq.read_hsv(i, matrix));
    return b;
}

namespace {

SequenceResult run_one(const BenchSequence& s, const TrackerConfig& config) {
    SequenceResult r;
    r.name = s.name;
    if (s.frames.size() < 2) {
        throw Error(ErrorKind::invalid_parameter, "sequence needs at least two frames");
    }
    if (s.truth.size() != s.frames.size()) {
        throw Error(ErrorKind::length_mismatch, "ground truth does not match frame count");
    }
    TrackerState state = init(s.frames.front(), s.init, config);
    r.boxes.push_back(state.box);
    r.modes.push_back(TrackMode::camshift);

    using clock = std::chrono::steady_clock;
    clock::duration tracking{};
    for (std::size_t i = 1; i < s.frames.size(); ++i) {
        const auto t0 = clock::now();
        auto [next, out] = track_frame(state, s.frames[i], config);
        tracking += clock::now() - t0;
        state = std::move(next);
        r.boxes.push_back(out.box);
        r.modes.push_back(out.mode);
    }
    const double seconds = std::chrono::duration<double>(tracking).count();
    // Clock granularity can round a very fast run down to zero.
    r.mean_fps = double(s.frames.size() - 1) / std::max(seconds, 1e-9);

    for (std::size_t i = 0; i < r.boxes.size(); ++i) {
        r.ious.push_back(iou(r.boxes[i], s.truth[i]));
        r.center_errors.push_back(center_error(r.boxes[i], s.truth[i]));
    }
    r.success = success_curve(r.boxes, s.truth);
    r.precision = precision_curve(r.boxes, s.truth);
    r.ok = true;
    return r;
}

}  // namespace

BenchReport run_benchmark(const std::vector<BenchSequence>& sequences,
                          const TrackerConfig& config) {
    if (sequences.empty()) throw Error(ErrorKind::invalid_parameter, "no sequences to benchmark");
    config.validate();
    BenchReport report;
    int ok = 0;
    for (const auto& s : sequences) {
        try {
            report.sequences.push_back(run_one(s, config));
            const auto& r = report.sequences.back();
            report.mean_auc += r.success.auc;
            report.mean_precision_20px += r.precision.at_20px;
            report.mean_fps += r.mean_fps;
            ++ok;
        } catch (const Error& e) {
            SequenceResult failed;
            failed.name = s.name;
            failed.error = e.what();
            report.sequences.push_back(std::move(failed));
            ++report.failed;
        }
    }
    if (ok > 0) {
        report.mean_auc /= ok;
        report.mean_precision_20px /= ok;
        report.mean_fps /= ok;
    }
    return report;
}

std::set<Format> parse_formats(std::string_view text) {
    std::set<Format> out;
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, ',')) {
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        if (item.empty() || item == "none") continue;
        if (item == "csv") {
            out.insert(Format::csv);
        } else if (item == "json") {
            out.insert(Format::json);
        } else if (item == "svg") {
            out.insert(Format::svg);
        } else {
            throw Error(ErrorKind::invalid_parameter,
                        "unknown report format '" + item + "' (expected csv, json, svg)");
        }
    }
    return out;
}

std::string format_formats(const std::set<Format>& formats) {
    std::string s;
    for (auto f : formats) {
        if (!s.empty()) s += ',';
        s += f == Format::csv ? "csv" : f == Format::json ? "json" : "svg";
    }
    return s.empty() ? "none" : s;
}

namespace {

nlohmann::json curve_json(const Curve& c) {
    return {{"thresholds", c.thresholds}, {"values", c.values}, {"auc", c.auc}};
}

}  // namespace

nlohmann::json to_json(const BenchReport& report) {
    nlohmann::json j;
    j["sequences"] = nlohmann::json::array();
    for (const auto& s : report.sequences) {
        nlohmann::json e{{"name", s.name}, {"ok", s.ok}};
        if (!s.ok) {
            e["error"] = s.error;
        } else {
            e["success"] = curve_json(s.success);
            e["precision"] = curve_json(s.precision.curve);
            e["precision_at_20px"] = s.precision.at_20px;
            e["mean_fps"] = s.mean_fps;
            e["frames"] = s.boxes.size();
            e["kalman_frames"] = std::count(s.modes.begin(), s.modes.end(), TrackMode::kalman);
        }
        j["sequences"].push_back(std::move(e));
    }
    j["aggregate"] = {{"mean_success_auc", report.mean_auc},
                      {"mean_precision_at_20px", report.mean_precision_20px},
                      {"mean_fps", report.mean_fps},
                      {"failed_sequences", report.failed}};
    // Published OTB50 figures, echoed for comparison only.
    j["reference"] = {{"precision",
                       {{"Struck", 0.535}, {"TLD", 0.519}, {"binary-camshift (FPGA)", 0.484}}},
                      {"mean_fps", {{"Struck", 9.8}, {"TLD", 24.4}, {"binary-camshift (FPGA)", 309.91}}}};
    return j;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

struct Series {
    std::string label;
    const Curve* curve;
};

struct ReferenceLine {
    std::string label;
    double value;
};

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string render_plot(const std::string& title, const std::string& x_label, double x_max,
                        const std::vector<Series>& series,
                        const std::vector<ReferenceLine>& references) {
    constexpr double W = 560, H = 400, L = 60, R = 20, T = 40, B = 50;
    const double pw = W - L - R;
    const double ph = H - T - B;
    auto px = [&](double x) { return L + pw * x / x_max; };
    auto py = [&](double y) { return T + ph * (1.0 - y); };

    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << xml_escape(title) << "</text>\n";
    for (int i = 0; i <= 10; ++i) {
        const double y = i / 10.0;
        os << "<line x1=\"" << L << "\" y1=\"" << py(y) << "\" x2=\"" << L + pw << "\" y2=\""
           << py(y) << "\" stroke=\"#e0e0e0\"/>\n";
        os << "<text x=\"" << L - 6 << "\" y=\"" << py(y) + 4 << "\" text-anchor=\"end\">" << y
           << "</text>\n";
        const double x = x_max * i / 10.0;
        os << "<text x=\"" << px(x) << "\" y=\"" << T + ph + 16 << "\" text-anchor=\"middle\">"
           << std::setprecision(x_max > 2 ? 0 : 1) << x << std::setprecision(2) << "</text>\n";
    }
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">"
       << xml_escape(x_label) << "</text>\n";

    for (const auto& ref : references) {
        os << "<line x1=\"" << L << "\" y1=\"" << py(ref.value) << "\" x2=\"" << L + pw
           << "\" y2=\"" << py(ref.value) << "\" stroke=\"#888\" stroke-dasharray=\"4,3\"/>\n";
        os << "<text x=\"" << L + 4 << "\" y=\"" << py(ref.value) - 3 << "\" fill=\"#666\">"
           << xml_escape(ref.label) << "</text>\n";
    }
    for (std::size_t i = 0; i < series.size(); ++i) {
        const Curve& c = *series[i].curve;
        const char* color = kPalette[i % std::size(kPalette)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
        for (std::size_t k = 0; k < c.values.size(); ++k) {
            os << px(c.thresholds[k]) << ',' << py(c.values[k]) << ' ';
        }
        os << "\"/>\n";
        const double ly = T + 16 + 16.0 * double(i);
        os << "<line x1=\"" << L + pw - 190 << "\" y1=\"" << ly - 4 << "\" x2=\"" << L + pw - 170
           << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << L + pw - 165 << "\" y=\"" << ly << "\">" << xml_escape(series[i].label)
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string safe_name(const std::string& name) {
    std::string s;
    for (char c : name) s += std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_';
    return s.empty() ? "sequence" : s;
}

std::string label(const std::string& name, const char* metric, double value) {
    std::ostringstream os;
    os << name << " [" << metric << std::fixed << std::setprecision(3) << value << ']';
    return os.str();
}

Curve mean_curve(const std::vector<const Curve*>& curves) {
    Curve m;
    if (curves.empty()) return m;
    m.thresholds = curves.front()->thresholds;
    m.values.assign(m.thresholds.size(), 0.0);
    for (const Curve* c : curves) {
        for (std::size_t i = 0; i < m.values.size(); ++i) m.values[i] += c->values[i];
    }
    for (auto& v : m.values) v /= double(curves.size());
    m.auc = std::accumulate(m.values.begin(), m.values.end(), 0.0) / double(m.values.size());
    return m;
}

void write_text(const std::filesystem::path& path, const std::string& text,
                std::vector<std::filesystem::path>& written) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::io, path.string() + ": cannot open for writing");
    out << text;
    if (!out) throw Error(ErrorKind::io, path.string() + ": write failed");
    written.push_back(path);
}

}  // namespace

std::vector<std::filesystem::path> emit_report(const BenchReport& report,
                                               const std::set<Format>& formats,
                                               const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> written;
    if (formats.empty()) return written;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw Error(ErrorKind::io, dir.string() + ": cannot create output directory");
    }

    if (formats.count(Format::json)) {
        write_text(dir / "report.json", to_json(report).dump(2) + "\n", written);
    }
    if (formats.count(Format::csv)) {
        std::ostringstream os;
        os << "sequence,index,iou,center_error,mode\n" << std::setprecision(6);
        for (const auto& s : report.sequences) {
            for (std::size_t i = 0; i < s.boxes.size(); ++i) {
                os << s.name << ',' << i << ',' << s.ious[i] << ',' << s.center_errors[i] << ','
                   << to_string(s.modes[i]) << '\n';
            }
        }
        write_text(dir / "frames.csv", os.str(), written);
    }
    if (formats.count(Format::svg)) {
        const std::vector<ReferenceLine> refs{{"OTB50 ref: Struck 53.5%", 0.535},
                                              {"OTB50 ref: TLD 51.9%", 0.519},
                                              {"OTB50 ref: binary Camshift 48.4%", 0.484}};
        std::vector<const Curve*> successes;
        std::vector<const Curve*> precisions;
        for (const auto& s : report.sequences) {
            if (!s.ok) continue;
            successes.push_back(&s.success);
            precisions.push_back(&s.precision.curve);
            const std::string base = safe_name(s.name);
            write_text(dir / ("success_" + base + ".svg"),
                       render_plot("Success plot: " + s.name, "overlap threshold", 1.0,
                                   {{label(s.name, "AUC ", s.success.auc), &s.success}}, {}),
                       written);
            write_text(dir / ("precision_" + base + ".svg"),
                       render_plot("Precision plot: " + s.name, "location error threshold (px)",
                                   50.0,
                                   {{label(s.name, "@20px ", s.precision.at_20px),
                                     &s.precision.curve}},
                                   refs),
                       written);
        }
        const Curve mean_success = mean_curve(successes);
        const Curve mean_precision = mean_curve(precisions);
        std::vector<Series> success_series;
        std::vector<Series> precision_series;
        if (!successes.empty()) {
            success_series.push_back({label("mean", "AUC ", mean_success.auc), &mean_success});
            precision_series.push_back(
                {label("mean", "@20px ", report.mean_precision_20px), &mean_precision});
        }
        write_text(dir / "success.svg",
                   render_plot("Success plot (OPE)", "overlap threshold", 1.0, success_series, {}),
                   written);
        write_text(dir / "precision.svg",
                   render_plot("Precision plot (OPE)", "location error threshold (px)", 50.0,
                               precision_series, refs),
                   written);
    }
    return written;
}

}  // namespace camtrack::bench
