#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "../support.hpp"
#include "camtrack/bench.hpp"
#include "camtrack/synthetic.hpp"

using namespace camtrack;
using namespace camtrack::bench;
namespace fs = std::filesystem;

namespace {

Rect random_rect(std::mt19937& rng) {
    std::uniform_int_distribution<int> pos(-20, 40);
    std::uniform_int_distribution<int> size(1, 30);
    return Rect{pos(rng), pos(rng), size(rng), size(rng)};
}

BenchSequence synthetic_sequence(const std::string& name, const synth::Scene& scene) {
    const auto s = synth::generate(scene);
    BenchSequence b{name, {}, s.truth, s.truth.front()};
    for (const auto& f : s.frames) b.frames.push_back(rgb_to_hsv(f));
    return b;
}

}  // namespace

TEST_SUITE("bench") {

TEST_CASE("iou values") {
    CHECK(iou(Rect{3, 4, 5, 6}, Rect{3, 4, 5, 6}) == 1.0);
    CHECK(iou(Rect{0, 0, 2, 2}, Rect{5, 5, 2, 2}) == 0.0);
    CHECK(iou(Rect{0, 0, 2, 2}, Rect{2, 0, 2, 2}) == 0.0);  // touching edges
    CHECK(iou(Rect{0, 0, 2, 2}, Rect{1, 1, 2, 2}) == doctest::Approx(1.0 / 7.0));
    CHECK(iou(Rect{0, 0, 2, 2}, Rect{1, 1, 2, 2}) == oracle::raster_iou(Rect{0, 0, 2, 2}, Rect{1, 1, 2, 2}));
}

TEST_CASE("iou equals the raster oracle") {
    std::mt19937 rng(12);
    for (int i = 0; i < 3000; ++i) {
        const Rect a = random_rect(rng), b = random_rect(rng);
        REQUIRE(iou(a, b) == oracle::raster_iou(a, b));
        REQUIRE(iou(a, b) == iou(b, a));
    }
}

TEST_CASE("center error") {
    CHECK(center_error(Rect{0, 0, 10, 10}, Rect{3, 4, 10, 10}) == 5.0);
    CHECK(center_error(Rect{0, 0, 10, 10}, Rect{0, 0, 12, 10}) == 1.0);
}

TEST_CASE("success curve rules") {
    const std::vector<Rect> gt{Rect{0, 0, 10, 10}};
    const Curve all = success_curve(gt, gt);
    REQUIRE(all.values.size() == 21);
    CHECK(all.values.front() == 1.0);
    CHECK(all.values.back() == 0.0);  // strict > at t = 1
    CHECK(all.auc == doctest::Approx(20.0 / 21.0));

    // IoU exactly 0.5: 10x10 truth against 10x5 result inside it
    const std::vector<Rect> half{Rect{0, 0, 10, 5}};
    REQUIRE(iou(half[0], gt[0]) == 0.5);
    const Curve c = success_curve(half, gt, {0, 0.25, 0.5, 0.75, 1});
    CHECK(c.values == std::vector<double>{1, 1, 0, 0, 0});
    CHECK(c.auc == doctest::Approx(0.4));

    CHECK_THROWS_AS((void)success_curve(half, gt, {}), Error);
    CHECK_THROWS_AS((void)success_curve(half, GroundTruth{}), Error);
}

TEST_CASE("precision rules") {
    const std::vector<Rect> gt{Rect{0, 0, 10, 10}};
    CHECK(precision_curve(gt, gt).at_20px == 1.0);
    CHECK(precision_curve({Rect{25, 0, 10, 10}}, gt).at_20px == 0.0);
    CHECK(precision_curve({Rect{20, 0, 10, 10}}, gt).at_20px == 1.0);  // <= 20 px
}

TEST_CASE("curves equal a reference recomputation") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + int(rng() % 60);
        std::vector<Rect> res, gt;
        std::vector<double> ious, errs;
        for (int i = 0; i < n; ++i) {
            res.push_back(random_rect(rng));
            gt.push_back(random_rect(rng));
            ious.push_back(oracle::raster_iou(res.back(), gt.back()));
            const double dx = (res.back().x + res.back().w / 2.0) - (gt.back().x + gt.back().w / 2.0);
            const double dy = (res.back().y + res.back().h / 2.0) - (gt.back().y + gt.back().h / 2.0);
            errs.push_back(std::sqrt(dx * dx + dy * dy));
        }
        const Curve s = success_curve(res, gt);
        const auto want_s = oracle::success_values(ious, s.thresholds);
        REQUIRE(s.values == want_s);
        double mean = 0;
        for (double v : want_s) mean += v;
        REQUIRE(s.auc == doctest::Approx(mean / double(want_s.size())));
        const PrecisionResult p = precision_curve(res, gt);
        REQUIRE(p.curve.values == oracle::precision_values(errs, p.curve.thresholds));
        REQUIRE(p.at_20px == oracle::precision_values(errs, {20.0})[0]);
        for (std::size_t i = 1; i < s.values.size(); ++i) REQUIRE(s.values[i] <= s.values[i - 1]);
        for (std::size_t i = 1; i < p.curve.values.size(); ++i)
            REQUIRE(p.curve.values[i] >= p.curve.values[i - 1]);
    }
}

TEST_CASE("ground truth files") {
    const auto path = fs::temp_directory_path() / "camtrack_gt.txt";
    {
        std::ofstream out(path);
        out << "1,1,10,20\n5\t6\t7\t8\r\n\n3 4 5 6\n";
    }
    const GroundTruth gt = load_ground_truth(path);
    REQUIRE(gt.size() == 3);
    CHECK(gt[0] == Rect{0, 0, 10, 20});
    CHECK(gt[1] == Rect{4, 5, 7, 8});
    {
        std::ofstream out(path);
        out << "1,2,3\n";
    }
    CHECK_THROWS_AS((void)load_ground_truth(path), Error);
}

TEST_CASE("synthetic disk benchmark") {
    const BenchSequence seq = synthetic_sequence("disk", synth::Scene{});
    const BenchReport a = run_benchmark({seq}, TrackerConfig{});
    REQUIRE(a.sequences.size() == 1);
    REQUIRE(a.sequences[0].ok);
    CHECK(a.sequences[0].success.auc >= 0.7);
    CHECK(a.sequences[0].boxes.size() == 100);

    const BenchReport b = run_benchmark({seq, seq}, TrackerConfig{});
    CHECK(b.sequences[0].ious == b.sequences[1].ious);
    CHECK(b.sequences[0].success.auc == a.sequences[0].success.auc);
    CHECK(b.mean_auc == doctest::Approx(a.mean_auc));
}

TEST_CASE("benchmark errors") {
    CHECK_THROWS_AS((void)run_benchmark({}, TrackerConfig{}), Error);
    BenchSequence bad = synthetic_sequence("short", synth::Scene{.frames = 3});
    bad.truth.pop_back();
    const BenchReport r = run_benchmark({bad}, TrackerConfig{});
    CHECK(r.failed == 1);
    CHECK_FALSE(r.sequences[0].ok);
}

TEST_CASE("report files") {
    const auto dir = fs::temp_directory_path() / "camtrack_report";
    fs::remove_all(dir);
    synth::Scene scene;
    scene.frames = 12;
    const BenchReport r = run_benchmark({synthetic_sequence("disk", scene)}, TrackerConfig{});

    CHECK(emit_report(r, {}, dir).empty());
    CHECK_FALSE(fs::exists(dir));

    const auto files = emit_report(r, {Format::csv}, dir);
    REQUIRE(files.size() == 1);
    std::ifstream csv(dir / "frames.csv");
    std::string line;
    int rows = 0;
    std::getline(csv, line);
    CHECK(line == "sequence,index,iou,center_error,mode");
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 12);

    const auto all = emit_report(r, {Format::csv, Format::json, Format::svg}, dir);
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "success_disk.svg"));
    CHECK(fs::exists(dir / "precision_disk.svg"));
    CHECK(all.size() == 6);
    const auto j = to_json(r);
    CHECK(j["sequences"].size() == 1);
}

TEST_CASE("format names") {
    CHECK(parse_formats("csv,svg") == std::set<Format>{Format::csv, Format::svg});
    CHECK(parse_formats("none").empty());
    CHECK_THROWS_AS((void)parse_formats("pdf"), Error);
    CHECK(parse_formats(format_formats({Format::json})) == std::set<Format>{Format::json});
}

}
