#include "camtrack/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace camtrack::synth {

Point2d center_at(const Scene& scene, int frame) {
    return {scene.start.x + scene.velocity.x * frame, scene.start.y + scene.velocity.y * frame};
}

bool hidden(const Scene& scene, int frame) {
    return scene.occlusion_first >= 0 && frame >= scene.occlusion_first &&
           frame < scene.occlusion_first + scene.occlusion_length;
}

namespace {

// Pixel (x, y) covers [x, x+1) x [y, y+1); it belongs to the target when its
// center does.
bool inside(const Scene& scene, Point2d c, int x, int y) {
    const double dx = x + 0.5 - c.x;
    const double dy = y + 0.5 - c.y;
    if (scene.shape == Shape::square) {
        return std::abs(dx) <= scene.radius && std::abs(dy) <= scene.radius;
    }
    return dx * dx + dy * dy <= scene.radius * scene.radius;
}

}  // namespace

Sequence generate(const Scene& scene) {
    Sequence seq;
    std::mt19937 rng(scene.seed);
    std::uniform_int_distribution<int> jitter(-scene.noise, scene.noise);
    for (int f = 0; f < scene.frames; ++f) {
        RgbFrame frame(scene.width, scene.height);
        const Point2d c = center_at(scene, f);
        const bool visible = !hidden(scene, f);
        int x0 = scene.width, y0 = scene.height, x1 = -1, y1 = -1;
        for (int y = 0; y < scene.height; ++y) {
            for (int x = 0; x < scene.width; ++x) {
                const bool in = inside(scene, c, x, y);
                if (in) {
                    x0 = std::min(x0, x);
                    y0 = std::min(y0, y);
                    x1 = std::max(x1, x);
                    y1 = std::max(y1, y);
                }
                if (in && visible) {
                    frame.set_pixel(x, y, scene.target);
                    continue;
                }
                Rgb bg = scene.background;
                if (scene.noise > 0) {
                    for (auto& ch : bg) ch = static_cast<std::uint8_t>(std::clamp(ch + jitter(rng), 0, 255));
                }
                frame.set_pixel(x, y, bg);
            }
        }
        seq.frames.push_back(std::move(frame));
        seq.truth.push_back(x1 >= 0 ? Rect{x0, y0, x1 - x0 + 1, y1 - y0 + 1} : Rect{});
        seq.visible.push_back(visible);
    }
    return seq;
}

}  // namespace camtrack::synth
