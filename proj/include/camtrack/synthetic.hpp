#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "camtrack/imaging.hpp"

namespace camtrack::synth {

enum class Shape { disk, square };

/// A single colored target moving at constant velocity over a flat
/// background, with an optional span of frames where it is not drawn.
struct Scene {
    int width = 640;
    int height = 480;
    int frames = 100;
    Shape shape = Shape::disk;
    double radius = 20.0;  // disk radius, or half the square side
    Point2d start{100.0, 240.0};
    Point2d velocity{3.0, 0.0};
    Rgb background{60, 60, 60};
    Rgb target{210, 130, 50};
    int occlusion_first = -1;  // first hidden frame, -1 for none
    int occlusion_length = 0;
    int noise = 0;  // uniform per-channel noise amplitude on the background
    std::uint32_t seed = 1;
};

struct Sequence {
    std::vector<RgbFrame> frames;
    std::vector<Rect> truth;     // tight box of the target pixels (hidden frames too)
    std::vector<bool> visible;
};

[[nodiscard]] Point2d center_at(const Scene& scene, int frame);
[[nodiscard]] bool hidden(const Scene& scene, int frame);
[[nodiscard]] Sequence generate(const Scene& scene);

}  // namespace camtrack::synth
