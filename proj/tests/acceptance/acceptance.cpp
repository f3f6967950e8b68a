// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// only when a gated criterion fails; throughput is reported, never gated.

#include <chrono>
#include <cstdio>
#include <random>
#include <string>

#include "../support.hpp"
#include "camtrack/bench.hpp"
#include "camtrack/kalman.hpp"
#include "camtrack/pipeline_sim.hpp"
#include "camtrack/synthetic.hpp"
#include "camtrack/tracker.hpp"

using namespace camtrack;
using clock_type = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(bool pass, const char* name, const std::string& detail, bool gated = true) {
    const char* verdict = pass ? "PASS" : (gated ? "FAIL" : "FLAG");
    std::printf("%-4s  %-34s %s\n", verdict, name, detail.c_str());
    if (!pass && gated) ++failures;
}

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<HsvFrame> to_hsv(const synth::Sequence& s) {
    std::vector<HsvFrame> out;
    for (const auto& f : s.frames) out.push_back(rgb_to_hsv(f));
    return out;
}

void classifier_equivalence() {
    std::mt19937 rng(101);
    long mismatches = 0;
    std::uint64_t set_bits = 0;
    double classify_time = 0.0;
    const auto t_all = clock_type::now();
    for (int trial = 0; trial < 1000; ++trial) {
        const ClassifierParams p = oracle::random_params(rng);
        const HsvMean m{std::uint8_t(rng()), std::uint8_t(rng()), std::uint8_t(rng())};
        const HsvFrame f = trial % 2 ? oracle::random_hsv_frame(rng, 64, 64)
                                     : oracle::clustered_hsv_frame(rng, 64, 64, m, 48);
        const auto t0 = clock_type::now();
        const BinaryMask mask = classify_frame(f, m, p);
        classify_time += seconds_since(t0);
        set_bits += mask.popcount();
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x) mismatches += mask.get(x, y) != oracle::classify(f.pixel(x, y), m, p);
    }
    const double total = seconds_since(t_all);
    report(mismatches == 0 && total < 10.0, "classifier oracle equivalence",
           fmt("1000 frames 64x64, %ld mismatched pixels, %llu set, classify %.3f s, total %.2f s",
               mismatches, (unsigned long long)set_bits, classify_time, total));
}

void parallel_reduction() {
    std::mt19937 rng(202);
    long mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int w = 8 + int(rng() % 120), h = 8 + int(rng() % 120);
        const BinaryMask mask = oracle::random_mask(rng, w, h, 0.02 + 0.96 * (trial % 25) / 25.0);
        const Rect win = oracle::random_window(rng, w, h);
        const WeightKernel k = oracle::random_kernel(rng, w, h);
        const Moments serial = weighted_moments(mask, win, k);
        mismatches += !(serial == oracle::moments(mask, win, k));
        for (int n : {1, 2, 4, 8, 16}) mismatches += !(parallel_moments(mask, win, k, n) == serial);
    }
    report(mismatches == 0, "parallel reduction exactness",
           fmt("1000 masks x n in {1,2,4,8,16}, %ld mismatches", mismatches));
}

void uniform_kernel() {
    std::mt19937 rng(303);
    double worst = 0.0;
    int checked = 0;
    for (int trial = 0; checked < 500; ++trial) {
        const int w = 4 + int(rng() % 100), h = 4 + int(rng() % 100);
        const BinaryMask mask = oracle::random_mask(rng, w, h, 0.05 + 0.9 * (trial % 10) / 10.0);
        const Rect win = oracle::random_window(rng, w, h);
        const auto clipped = *clamp_to_frame(win, w, h);
        double sx = 0, sy = 0, n = 0;
        for (int y = clipped.y; y < clipped.bottom(); ++y)
            for (int x = clipped.x; x < clipped.right(); ++x)
                if (mask.get(x, y)) sx += x, sy += y, n += 1;
        if (n == 0) continue;
        const WeightKernel k{{rng() % 50 * 1.0, rng() % 50 * 1.0}, 2.0, KernelShape::uniform};
        const auto est = centroid_and_size(weighted_moments(mask, win, k), clipped);
        worst = std::max({worst, std::abs(est->centroid.x - sx / n), std::abs(est->centroid.y - sy / n)});
        ++checked;
    }
    report(worst < 1e-9, "uniform-kernel degeneration",
           fmt("%d masks, max centroid deviation %.3g px", checked, worst));
}

void kalman_convergence() {
    KalmanParams p;
    p.q = 0.0;
    p.p0 = 1e6;  // diffuse prior; with p0 = 10 the prior bias still shows at 1e-4 px after 20 steps
    auto truth = [](int k) { return Point2d{40.0 + 3.7 * k, 300.0 - 1.9 * k}; };
    KalmanState s = init_state(Rect{38, 298, 4, 4}, p);
    for (int k = 1; k <= 20; ++k) s = correct(predict(s, p), truth(k), p);
    const Point2d next = predict(s, p).position();
    const double err = std::hypot(next.x - truth(21).x, next.y - truth(21).y);

    std::mt19937 rng(404);
    std::uniform_real_distribution<double> pos(-500.0, 500.0);
    std::uniform_real_distribution<double> logq(-4.0, 2.0);
    int bad = 0;
    for (int run = 0; run < 1000; ++run) {
        KalmanParams rp;
        rp.q = std::pow(10.0, logq(rng));
        rp.r = std::pow(10.0, logq(rng));
        rp.p0 = std::pow(10.0, logq(rng) + 2.0);
        KalmanState st = init_state(Rect{0, 0, 8, 8}, rp);
        for (int step = 0; step < 40; ++step) {
            st = (rng() & 1) ? predict(st, rp) : correct(st, Point2d{pos(rng), pos(rng)}, rp);
            bad += !is_symmetric_psd(st.covariance);
        }
    }
    report(err < 1e-6 && bad == 0, "kalman convergence",
           fmt("one-step error after 20 steps %.3g px; %d non-PSD covariances in 1000 runs", err, bad));
}

void synthetic_tracking() {
    const TrackerConfig cfg;
    auto run = [&](const synth::Scene& scene) {
        const auto seq = synth::generate(scene);
        const auto frames = to_hsv(seq);
        TrackerState s = init(frames[0], seq.truth[0], cfg);
        std::vector<double> ious{bench::iou(s.box, seq.truth[0])};
        std::vector<TrackMode> modes{TrackMode::camshift};
        for (std::size_t i = 1; i < frames.size(); ++i) {
            auto [next, out] = track_frame(s, frames[i], cfg);
            s = next;
            ious.push_back(bench::iou(out.box, seq.truth[i]));
            modes.push_back(out.mode);
        }
        return std::pair{ious, modes};
    };

    synth::Scene plain;
    const auto [ious, modes] = run(plain);
    double mean = 0;
    for (double v : ious) mean += v;
    mean /= double(ious.size());
    const auto lost = std::count(modes.begin(), modes.end(), TrackMode::kalman);

    synth::Scene occluded;
    occluded.occlusion_first = 40;
    occluded.occlusion_length = 10;
    const auto [oious, omodes] = run(occluded);
    int kalman_in_occlusion = 0;
    for (int i = 40; i < 50; ++i) kalman_in_occlusion += omodes[i] == TrackMode::kalman;
    int recovered_after = -1;
    for (int i = 50; i < 55; ++i) {
        if (oious[i] > 0.5) {
            recovered_after = i - 50;
            break;
        }
    }
    report(mean >= 0.7 && lost == 0 && kalman_in_occlusion == 10 && recovered_after >= 0,
           "synthetic tracking",
           fmt("mean IoU %.3f, lost %ld; occlusion: KALMAN %d/10, IoU>0.5 %d frame(s) after reappearance",
               mean, long(lost), kalman_in_occlusion, recovered_after));
}

void pipeline_schedule() {
    const sim::SimConfig cfg;
    const sim::SimReport r = sim::simulate(cfg, 10);
    const double camera_hand = 1920.0 * 1080.0 * 16.0 * 60.0 / 1e9;
    double camera = 0;
    for (const auto& ch : r.bandwidth.channels)
        if (ch.name == "camera_ycbcr") camera = ch.gbit_per_s;
    const bool pass = r.display_latency == 2 && r.steady_throughput == 1.0 && r.hazards == 0 &&
                      r.bandwidth.total <= 10.0 && std::abs(camera - camera_hand) < 1e-12 &&
                      std::abs(camera - 1.99) < 0.005;
    report(pass, "pipeline schedule",
           fmt("latency %d slots, throughput %.3f frames/slot, hazards %d, bandwidth %.3f Gbit/s "
               "(camera %.3f)",
               r.display_latency, r.steady_throughput, r.hazards, r.bandwidth.total, camera));

    sim::SimConfig rgb = cfg;
    rgb.channels = sim::parse_channels(
        "camera:write:16,rgb:write:24,rgb:read:24,mask:write:1,mask:read:1,"
        "composite:write:24,composite:read:24");
    std::printf("      info: 24-bit RGB frame-buffer channel set would need %.3f Gbit/s\n",
                sim::aggregate_bandwidth(rgb).total);
}

void metric_oracles() {
    std::mt19937 rng(505);
    std::uniform_int_distribution<int> pos(-30, 60);
    std::uniform_int_distribution<int> size(1, 40);
    auto rect = [&] { return Rect{pos(rng), pos(rng), size(rng), size(rng)}; };
    long iou_mismatch = 0;
    for (int i = 0; i < 10000; ++i) {
        const Rect a = rect(), b = rect();
        iou_mismatch += bench::iou(a, b) != oracle::raster_iou(a, b);
    }
    long curve_mismatch = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + int(rng() % 200);
        std::vector<Rect> res, gt;
        std::vector<double> ious, errs;
        for (int i = 0; i < n; ++i) {
            const Rect g = rect();
            // results near the truth so the curves are not all zero
            const Rect r{g.x + pos(rng) / 4, g.y + pos(rng) / 4, std::max(1, g.w + pos(rng) / 6),
                         std::max(1, g.h + pos(rng) / 6)};
            res.push_back(r);
            gt.push_back(g);
            ious.push_back(oracle::raster_iou(r, g));
            errs.push_back(std::hypot((r.x + r.w / 2.0) - (g.x + g.w / 2.0),
                                      (r.y + r.h / 2.0) - (g.y + g.h / 2.0)));
        }
        const auto s = bench::success_curve(res, gt);
        const auto p = bench::precision_curve(res, gt);
        curve_mismatch += s.values != oracle::success_values(ious, s.thresholds);
        curve_mismatch += p.curve.values != oracle::precision_values(errs, p.curve.thresholds);
    }
    report(iou_mismatch == 0 && curve_mismatch == 0, "metric oracles",
           fmt("10000 rect pairs, %ld IoU mismatches; 200 result sets, %ld curve mismatches",
               iou_mismatch, curve_mismatch));
}

void throughput() {
    std::vector<bench::BenchSequence> seqs;
    for (int i = 0; i < 3; ++i) {
        synth::Scene scene;
        scene.noise = 12;
        scene.seed = std::uint32_t(i + 1);
        scene.velocity = {2.0 + i, 0.5 * i};
        const auto s = synth::generate(scene);
        seqs.push_back({"synthetic" + std::to_string(i), to_hsv(s), s.truth, s.truth.front()});
    }
    TrackerConfig cfg;
    cfg.workers = 1;
    const bench::BenchReport r = bench::run_benchmark(seqs, cfg);
    report(r.failed == 0 && r.mean_fps >= 300.0, "throughput (reported, not gated)",
           fmt("mean %.1f FPS at 640x480, 1 worker; published reference 309.91 FPS", r.mean_fps),
           false);
}

}  // namespace

int main() {
    classifier_equivalence();
    parallel_reduction();
    uniform_kernel();
    kalman_convergence();
    synthetic_tracking();
    pipeline_schedule();
    metric_oracles();
    throughput();
    std::printf("%s\n", failures == 0 ? "all gated criteria passed"
                                       : (std::to_string(failures) + " gated criteria failed").c_str());
    return failures == 0 ? 0 : 1;
}
