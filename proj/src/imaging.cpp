#include "camtrack/imaging.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace camtrack {

Rect fit_centered(Point2d center, int w, int h, int frame_w, int frame_h) {
    w = std::clamp(w, 1, frame_w);
    h = std::clamp(h, 1, frame_h);
    auto place = [](double c, int size, int limit) {
        const double left = std::floor(c - 0.5 * size + 0.5);
        const double clamped = std::clamp(left, 0.0, double(limit - size));
        return static_cast<int>(clamped);
    };
    return Rect{place(center.x, w, frame_w), place(center.y, h, frame_h), w, h};
}

// ---------------------------------------------------------------------------
// Color conversion

namespace {

struct MatrixCoefficients {
    std::int32_t luma;
    std::int32_t cr_to_r;
    std::int32_t cb_to_g;
    std::int32_t cr_to_g;
    std::int32_t cb_to_b;
};

constexpr std::int32_t to_q16(double v) { return static_cast<std::int32_t>(v * 65536.0 + 0.5); }

// Limited range: luma spans 219 codes above 16, chroma 224 codes around 128.
constexpr MatrixCoefficients make_coefficients(double kr, double kb) {
    const double kg = 1.0 - kr - kb;
    const double chroma = 255.0 / 224.0;
    return {
        to_q16(255.0 / 219.0),
        to_q16(2.0 * (1.0 - kr) * chroma),
        to_q16(2.0 * (1.0 - kb) * kb / kg * chroma),
        to_q16(2.0 * (1.0 - kr) * kr / kg * chroma),
        to_q16(2.0 * (1.0 - kb) * chroma),
    };
}

constexpr MatrixCoefficients kBt601 = make_coefficients(0.299, 0.114);
constexpr MatrixCoefficients kBt709 = make_coefficients(0.2126, 0.0722);

static_assert(kBt709.luma == 76309);
static_assert(kBt709.cr_to_r == 117489);
static_assert(kBt601.cb_to_b == 132201);

constexpr std::uint8_t clamp_q16(std::int32_t v) {
    // Arithmetic right shift floors, so adding half rounds to nearest.
    const std::int32_t r = (v + (1 << 15)) >> 16;
    return static_cast<std::uint8_t>(std::clamp(r, 0, 255));
}

const MatrixCoefficients& coefficients(ColorMatrix m) {
    return m == ColorMatrix::bt601_limited ? kBt601 : kBt709;
}

}  // namespace

std::optional<ColorMatrix> parse_color_matrix(std::string_view s) {
    if (s == "bt709" || s == "bt709-limited") return ColorMatrix::bt709_limited;
    if (s == "bt601" || s == "bt601-limited") return ColorMatrix::bt601_limited;
    return std::nullopt;
}

std::string_view to_string(ColorMatrix m) {
    return m == ColorMatrix::bt601_limited ? "bt601" : "bt709";
}

Rgb ycbcr_to_rgb_pixel(std::uint8_t y, std::uint8_t cb, std::uint8_t cr,
                       ColorMatrix matrix) noexcept {
    const auto& k = coefficients(matrix);
    const std::int32_t yy = k.luma * (std::int32_t{y} - 16);
    const std::int32_t db = std::int32_t{cb} - 128;
    const std::int32_t dr = std::int32_t{cr} - 128;
    return {clamp_q16(yy + k.cr_to_r * dr), clamp_q16(yy - k.cb_to_g * db - k.cr_to_g * dr),
            clamp_q16(yy + k.cb_to_b * db)};
}

RgbFrame ycbcr422_to_rgb(const Ycbcr422Frame& src, ColorMatrix matrix) {
    if (src.empty()) throw Error(ErrorKind::malformed_frame, "YCbCr 4:2:2 frame: empty");
    RgbFrame out(src.width(), src.height());
    for (int y = 0; y < src.height(); ++y) {
        const auto in = src.row(y);
        auto dst = out.row(y);
        for (int x = 0; x < src.width(); x += 2) {
            const std::size_t i = std::size_t(x) * 2;
            const std::uint8_t cb = in[i + 1];
            const std::uint8_t cr = in[i + 3];
            const Rgb p0 = ycbcr_to_rgb_pixel(in[i], cb, cr, matrix);
            const Rgb p1 = ycbcr_to_rgb_pixel(in[i + 2], cb, cr, matrix);
            std::copy(p0.begin(), p0.end(), dst.begin() + std::ptrdiff_t(x) * 3);
            std::copy(p1.begin(), p1.end(), dst.begin() + std::ptrdiff_t(x + 1) * 3);
        }
    }
    return out;
}

Hsv rgb_to_hsv_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
    const int mx = std::max({r, g, b});
    const int mn = std::min({r, g, b});
    const int delta = mx - mn;
    if (mx == 0 || delta == 0) return {0, 0, static_cast<std::uint8_t>(mx)};

    // Position on the hue circle in units of delta, in [0, 6 * delta).
    int t;
    if (mx == r) {
        t = int{g} - int{b};
        if (t < 0) t += 6 * delta;
    } else if (mx == g) {
        t = 2 * delta + int{b} - int{r};
    } else {
        t = 4 * delta + int{r} - int{g};
    }
    // floor(256 * 60 * t / delta / 360) == floor(128 * t / (3 * delta))
    const int h = (128 * t) / (3 * delta);
    const int s = (255 * delta) / mx;
    return {static_cast<std::uint8_t>(h & 0xFF), static_cast<std::uint8_t>(s),
            static_cast<std::uint8_t>(mx)};
}

HsvFrame rgb_to_hsv(const RgbFrame& src) {
    if (src.empty()) throw Error(ErrorKind::malformed_frame, "RGB frame: empty");
    HsvFrame out(src.width(), src.height());
    const auto in = src.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < in.size(); i += 3) {
        const Hsv p = rgb_to_hsv_pixel(in[i], in[i + 1], in[i + 2]);
        dst[i] = p[0];
        dst[i + 1] = p[1];
        dst[i + 2] = p[2];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Image files

namespace {

namespace fs = std::filesystem;

[[noreturn]] void io_error(const fs::path& path, const std::string& what) {
    throw Error(ErrorKind::io, path.string() + ": " + what);
}

std::string lower_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

bool is_pnm(const fs::path& p) {
    const auto ext = lower_extension(p);
    return ext == ".ppm" || ext == ".pnm" || ext == ".pgm";
}
bool is_png(const fs::path& p) { return lower_extension(p) == ".png"; }

struct PnmHeader {
    char type = 0;  // '3', '5' or '6'
    int width = 0;
    int height = 0;
    int maxval = 0;
};

// Reads the next header token, skipping whitespace and '#' comments.
bool next_token(std::istream& in, std::string& tok) {
    tok.clear();
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (!std::isspace(c)) break;
    }
    if (c == EOF) return false;
    do {
        tok.push_back(static_cast<char>(c));
        c = in.peek();
        if (c == EOF || std::isspace(c) || c == '#') break;
        in.get();
    } while (true);
    return true;
}

int parse_header_int(std::istream& in, const fs::path& path, const char* field) {
    std::string tok;
    if (!next_token(in, tok)) io_error(path, std::string("truncated header (") + field + ")");
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size() || v <= 0) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        io_error(path, std::string("bad header field ") + field + " '" + tok + "'");
    }
}

PnmHeader read_pnm_header(std::istream& in, const fs::path& path) {
    std::string magic;
    if (!next_token(in, magic) || magic.size() != 2 || magic[0] != 'P' ||
        (magic[1] != '3' && magic[1] != '5' && magic[1] != '6')) {
        io_error(path, "not a P3/P5/P6 portable pixmap");
    }
    PnmHeader h;
    h.type = magic[1];
    h.width = parse_header_int(in, path, "width");
    h.height = parse_header_int(in, path, "height");
    h.maxval = parse_header_int(in, path, "maxval");
    if (h.maxval > 255) io_error(path, "only 8-bit pixmaps are supported");
    return h;
}

RgbFrame read_pnm(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) io_error(path, "cannot open");
    const PnmHeader h = read_pnm_header(in, path);
    in.get();  // single whitespace byte after maxval
    const std::size_t n = std::size_t(h.width) * std::size_t(h.height);
    std::vector<std::uint8_t> data(n * 3);
    auto scale = [&](int v) {
        if (v > h.maxval) io_error(path, "sample exceeds maxval");
        return static_cast<std::uint8_t>(h.maxval == 255 ? v : (v * 255 + h.maxval / 2) / h.maxval);
    };
    if (h.type == '6' || h.type == '5') {
        const std::size_t ch = h.type == '6' ? 3 : 1;
        std::vector<std::uint8_t> raw(n * ch);
        if (!in.read(reinterpret_cast<char*>(raw.data()), std::streamsize(raw.size()))) {
            io_error(path, "truncated pixel data");
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < 3; ++c) data[i * 3 + c] = scale(raw[i * ch + (ch == 3 ? c : 0)]);
        }
    } else {
        for (auto& v : data) {
            int s;
            if (!(in >> s)) io_error(path, "truncated pixel data");
            v = scale(s);
        }
    }
    return RgbFrame(h.width, h.height, std::move(data));
}

RgbFrame read_png(const fs::path& path) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&image, path.c_str())) io_error(path, image.message);
    image.format = PNG_FORMAT_RGB;
    std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, data.data(), 0, nullptr)) {
        png_image_free(&image);
        io_error(path, image.message);
    }
    return RgbFrame(int(image.width), int(image.height), std::move(data));
}

}  // namespace

ImageSize read_image_size(const fs::path& path) {
    if (is_png(path)) {
        png_image image{};
        image.version = PNG_IMAGE_VERSION;
        if (!png_image_begin_read_from_file(&image, path.c_str())) io_error(path, image.message);
        const ImageSize size{int(image.width), int(image.height)};
        png_image_free(&image);
        return size;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) io_error(path, "cannot open");
    const PnmHeader h = read_pnm_header(in, path);
    return {h.width, h.height};
}

RgbFrame read_image(const fs::path& path) {
    if (is_png(path)) return read_png(path);
    if (is_pnm(path)) return read_pnm(path);
    io_error(path, "unsupported image format");
}

void write_ppm(const fs::path& path, const RgbFrame& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) io_error(path, "cannot open for writing");
    out << "P6\n" << frame.width() << ' ' << frame.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.data().data()),
              std::streamsize(frame.data().size()));
    if (!out) io_error(path, "write failed");
}

Ycbcr422Frame read_raw_ycbcr_frame(const fs::path& path, std::uintmax_t byte_offset, int width,
                                   int height) {
    Ycbcr422Frame frame(width, height);
    std::ifstream in(path, std::ios::binary);
    if (!in) io_error(path, "cannot open");
    in.seekg(std::streamoff(byte_offset));
    auto data = frame.data();
    if (!in.read(reinterpret_cast<char*>(data.data()), std::streamsize(data.size()))) {
        io_error(path, "truncated frame at offset " + std::to_string(byte_offset));
    }
    return frame;
}

// ---------------------------------------------------------------------------
// Sequences

std::optional<SequenceKind> parse_sequence_kind(std::string_view s) {
    if (s == "images" || s == "numbered-image-directory") return SequenceKind::numbered_images;
    if (s == "raw-ycbcr" || s == "raw-ycbcr-file") return SequenceKind::raw_ycbcr;
    return std::nullopt;
}

Sequence::Sequence(SequenceKind kind, std::vector<FrameSource> frames, int width, int height,
                   std::optional<double> fps_hint)
    : kind_(kind), frames_(std::move(frames)), width_(width), height_(height), fps_hint_(fps_hint) {
    if (frames_.empty()) throw Error(ErrorKind::io, "sequence has no frames");
}

RgbFrame Sequence::read_rgb(std::size_t index, ColorMatrix matrix) const {
    const FrameSource& src = frames_.at(index);
    if (kind_ == SequenceKind::raw_ycbcr) {
        return ycbcr422_to_rgb(read_raw_ycbcr_frame(src.path, src.byte_offset, width_, height_),
                               matrix);
    }
    RgbFrame frame = read_image(src.path);
    if (frame.width() != width_ || frame.height() != height_) {
        throw Error(ErrorKind::resolution_mismatch,
                    src.path.string() + ": resolution changed since the sequence was loaded");
    }
    return frame;
}

HsvFrame Sequence::read_hsv(std::size_t index, ColorMatrix matrix) const {
    return rgb_to_hsv(read_rgb(index, matrix));
}

namespace {

// Numeric key from the last run of digits in the stem ("img0042" -> 42).
std::optional<std::uint64_t> frame_number(const fs::path& p) {
    const std::string stem = p.stem().string();
    auto end = stem.find_last_of("0123456789");
    if (end == std::string::npos) return std::nullopt;
    auto begin = end;
    while (begin > 0 && std::isdigit(static_cast<unsigned char>(stem[begin - 1]))) --begin;
    const std::string digits = stem.substr(begin, end - begin + 1);
    if (digits.size() > 18) return std::nullopt;
    return std::stoull(digits);
}

Sequence load_image_directory(const fs::path& dir) {
    if (!fs::is_directory(dir)) io_error(dir, "not a directory");
    struct Entry {
        std::uint64_t number;
        fs::path path;
    };
    std::vector<Entry> entries;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const auto& p = e.path();
        if (!is_pnm(p) && !is_png(p)) continue;
        entries.push_back({frame_number(p).value_or(std::numeric_limits<std::uint64_t>::max()), p});
    }
    if (entries.empty()) io_error(dir, "no image frames found");
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.number != b.number ? a.number < b.number : a.path.filename() < b.path.filename();
    });

    const ImageSize first = read_image_size(entries.front().path);
    std::vector<FrameSource> frames;
    frames.reserve(entries.size());
    for (const auto& e : entries) {
        const ImageSize s = read_image_size(e.path);
        if (s.width != first.width || s.height != first.height) {
            std::ostringstream msg;
            msg << "mixed resolutions: " << e.path.filename().string() << " is " << s.width << 'x'
                << s.height << ", expected " << first.width << 'x' << first.height;
            throw Error(ErrorKind::resolution_mismatch, msg.str());
        }
        frames.push_back({e.path, 0});
    }
    return Sequence(SequenceKind::numbered_images, std::move(frames), first.width, first.height);
}

Sequence load_raw_ycbcr(const fs::path& file, std::optional<RawGeometry> raw) {
    if (!raw || raw->width <= 0 || raw->height <= 0) {
        throw Error(ErrorKind::invalid_parameter, "raw YCbCr input needs --width and --height");
    }
    if (raw->width % 2 != 0) {
        throw Error(ErrorKind::malformed_frame,
                    "YCbCr 4:2:2 frame: width " + std::to_string(raw->width) + " is odd");
    }
    if (!fs::is_regular_file(file)) io_error(file, "not a regular file");
    const std::uintmax_t frame_bytes = std::uintmax_t(raw->width) * std::uintmax_t(raw->height) * 2;
    const std::uintmax_t total = fs::file_size(file);
    if (total == 0 || total % frame_bytes != 0) {
        io_error(file, "size " + std::to_string(total) + " is not a multiple of the " +
                           std::to_string(frame_bytes) + "-byte frame");
    }
    std::vector<FrameSource> frames;
    for (std::uintmax_t off = 0; off < total; off += frame_bytes) frames.push_back({file, off});
    return Sequence(SequenceKind::raw_ycbcr, std::move(frames), raw->width, raw->height);
}

}  // namespace

Sequence load_sequence(const fs::path& path, SequenceKind kind, std::optional<RawGeometry> raw) {
    if (!fs::exists(path)) io_error(path, "does not exist");
    return kind == SequenceKind::raw_ycbcr ? load_raw_ycbcr(path, raw) : load_image_directory(path);
}

}  // namespace camtrack
