#include "pointamp/ingest.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "binary_io.hpp"
#include "pointamp/error.hpp"

namespace pointamp {

namespace {

constexpr std::string_view kClassNames[kClassCount] = {
    "ground", "grass", "road", "vegetation", "building",
    "pole",   "fence", "vehicle", "powerline", "unknown",
};

ClassMap make_dales_map() {
    ClassMap m;
    m.table.fill(CanonicalClass::Unknown);
    // DALES label values: 1 ground, 2 vegetation, 3 cars, 4 trucks,
    // 5 power lines, 6 fences, 7 poles, 8 buildings; 0 is unlabeled.
    m.table[1] = CanonicalClass::Ground;
    m.table[2] = CanonicalClass::Vegetation;
    m.table[3] = CanonicalClass::Vehicle;
    m.table[4] = CanonicalClass::Vehicle;
    m.table[5] = CanonicalClass::PowerLine;
    m.table[6] = CanonicalClass::Fence;
    m.table[7] = CanonicalClass::Pole;
    m.table[8] = CanonicalClass::Building;
    return m;
}

ClassMap make_las14_map() {
    ClassMap m;
    m.table.fill(CanonicalClass::Unknown);
    m.table[2] = CanonicalClass::Ground;
    m.table[3] = CanonicalClass::Grass;  // low vegetation
    m.table[4] = CanonicalClass::Vegetation;
    m.table[5] = CanonicalClass::Vegetation;
    m.table[6] = CanonicalClass::Building;
    m.table[11] = CanonicalClass::Road;
    m.table[13] = CanonicalClass::PowerLine;
    m.table[14] = CanonicalClass::PowerLine;
    m.table[15] = CanonicalClass::Pole;
    m.table[16] = CanonicalClass::PowerLine;
    m.table[17] = CanonicalClass::Road;  // bridge deck
    m.table[18] = CanonicalClass::Unknown;
    return m;
}

// Identity map for data that already carries canonical class values
// (synthetic test tiles).
ClassMap make_canonical_map() {
    ClassMap m;
    m.table.fill(CanonicalClass::Unknown);
    for (int i = 0; i < kClassCount; ++i) m.table[i] = static_cast<CanonicalClass>(i);
    return m;
}

std::map<std::string, ClassMap, std::less<>>& class_map_registry() {
    static std::map<std::string, ClassMap, std::less<>> registry = [] {
        std::map<std::string, ClassMap, std::less<>> r;
        r.emplace("dales", make_dales_map());
        r.emplace("las14", make_las14_map());
        r.emplace("canonical", make_canonical_map());
        return r;
    }();
    return registry;
}

std::mutex& registry_mutex() {
    static std::mutex m;
    return m;
}

bool parse_double_token(const std::string& tok, double& out) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + tok.size() && !tok.empty();
}

bool parse_class_token(const std::string& tok, long& out) {
    const char* begin = tok.c_str();
    char* end = nullptr;
    out = std::strtol(begin, &end, 10);
    return end == begin + tok.size() && !tok.empty();
}

using detail::ByteCursor;
using detail::put_f64;
using detail::put_u64;
using detail::slurp;

int skip_ppm_space(std::istream& in) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    return c;
}

int read_ppm_int(std::istream& in) {
    int c = skip_ppm_space(in);
    if (c == EOF || !std::isdigit(c))
        throw FormatError(FormatErrorKind::Corrupt, "PPM header: expected integer");
    int v = 0;
    while (c != EOF && std::isdigit(c)) {
        v = v * 10 + (c - '0');
        if (v > 1 << 30) throw FormatError(FormatErrorKind::Corrupt, "PPM header: value out of range");
        c = in.get();
    }
    if (c != EOF) in.unget();
    return v;
}

}  // namespace

std::string_view class_name(CanonicalClass c) { return kClassNames[static_cast<int>(c)]; }

std::optional<CanonicalClass> class_from_name(std::string_view name) {
    for (int i = 0; i < kClassCount; ++i) {
        if (kClassNames[i] == name) return static_cast<CanonicalClass>(i);
    }
    return std::nullopt;
}

const ClassMap& class_map(std::string_view scheme) {
    std::lock_guard lock(registry_mutex());
    auto& registry = class_map_registry();
    auto it = registry.find(scheme);
    if (it == registry.end())
        throw std::invalid_argument("unregistered class-map scheme: " + std::string(scheme));
    return it->second;
}

CanonicalClass map_class(std::uint8_t class_code, std::string_view scheme) {
    return class_map(scheme).table[class_code];
}

void register_class_map(std::string name, ClassMap map) {
    std::lock_guard lock(registry_mutex());
    class_map_registry().insert_or_assign(std::move(name), map);
}

// --- .xyzc --------------------------------------------------------------------

std::vector<RawPoint> parse_xyzc(std::istream& in) {
    std::vector<RawPoint> points;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();

        std::istringstream ls(line);
        std::vector<std::string> tokens;
        std::string tok;
        while (ls >> tok) tokens.push_back(tok);
        if (tokens.empty()) continue;                 // blank
        if (tokens[0][0] == '#') continue;            // comment

        if (tokens.size() != 4 && tokens.size() != 7)
            throw ParseError(line_no, "expected `x y z class [r g b]`, got " +
                                          std::to_string(tokens.size()) + " fields");

        RawPoint p;
        double coords[3];
        for (int i = 0; i < 3; ++i) {
            if (!parse_double_token(tokens[i], coords[i]))
                throw ParseError(line_no, "malformed coordinate `" + tokens[i] + "`");
            if (!std::isfinite(coords[i]))
                throw ParseError(line_no, "non-finite coordinate `" + tokens[i] + "`");
        }
        p.pos = {coords[0], coords[1], coords[2]};

        long cls = 0;
        if (!parse_class_token(tokens[3], cls))
            throw ParseError(line_no, "malformed class code `" + tokens[3] + "`");
        if (cls < 0 || cls > 255)
            throw ParseError(line_no, "class code " + std::to_string(cls) + " outside 0-255");
        p.class_code = static_cast<std::uint8_t>(cls);

        if (tokens.size() == 7) {
            p.has_rgb = true;
            for (int i = 0; i < 3; ++i) {
                double v;
                if (!parse_double_token(tokens[4 + i], v) || !std::isfinite(v))
                    throw ParseError(line_no, "malformed color component `" + tokens[4 + i] + "`");
                p.rgb[i] = static_cast<float>(v);
            }
        }
        points.push_back(p);
    }
    return points;
}

void write_xyzc(std::ostream& out, std::span<const RawPoint> points) {
    char buf[256];
    for (const RawPoint& p : points) {
        int n;
        if (p.has_rgb) {
            n = std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %u %.9g %.9g %.9g\n",
                              p.pos.x, p.pos.y, p.pos.z, p.class_code,
                              static_cast<double>(p.rgb[0]), static_cast<double>(p.rgb[1]),
                              static_cast<double>(p.rgb[2]));
        } else {
            n = std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g %u\n",
                              p.pos.x, p.pos.y, p.pos.z, p.class_code);
        }
        out.write(buf, n);
    }
}

// --- .pamp --------------------------------------------------------------------

namespace {
constexpr char kPampMagic[4] = {'P', 'A', 'M', 'P'};
constexpr std::uint8_t kPampVersion = 1;
constexpr std::uint8_t kPampFlagRgb = 0x01;
}  // namespace

std::vector<RawPoint> parse_pamp(std::istream& in) {
    const std::string bytes = slurp(in);
    ByteCursor cur{reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()};

    cur.need(4, "magic");
    if (std::memcmp(bytes.data(), kPampMagic, 4) != 0)
        throw FormatError(FormatErrorKind::BadMagic, "bad magic: not a PAMP point cloud");
    cur.pos = 4;
    const std::uint8_t version = cur.u8("version");
    if (version != kPampVersion)
        throw FormatError(FormatErrorKind::BadVersion,
                          "unknown PAMP version " + std::to_string(version));
    const std::uint64_t count = cur.u64("point count");

    std::vector<RawPoint> points;
    points.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 24)));
    for (std::uint64_t i = 0; i < count; ++i) {
        RawPoint p;
        p.pos.x = cur.f64("point x");
        p.pos.y = cur.f64("point y");
        p.pos.z = cur.f64("point z");
        if (!std::isfinite(p.pos.x) || !std::isfinite(p.pos.y) || !std::isfinite(p.pos.z))
            throw FormatError(FormatErrorKind::Corrupt,
                              "non-finite coordinate in record " + std::to_string(i));
        p.class_code = cur.u8("class code");
        const std::uint8_t flags = cur.u8("flags");
        if (flags & ~kPampFlagRgb)
            throw FormatError(FormatErrorKind::Corrupt,
                              "unknown flag bits in record " + std::to_string(i));
        if (flags & kPampFlagRgb) {
            p.has_rgb = true;
            for (int c = 0; c < 3; ++c)
                p.rgb[c] = static_cast<float>(cur.u8("rgb")) / 255.0f;
        }
        points.push_back(p);
    }
    return points;
}

void write_pamp(std::ostream& out, std::span<const RawPoint> points) {
    std::string buf;
    buf.reserve(13 + points.size() * 26);
    buf.append(kPampMagic, 4);
    buf.push_back(static_cast<char>(kPampVersion));
    put_u64(buf, points.size());
    for (const RawPoint& p : points) {
        put_f64(buf, p.pos.x);
        put_f64(buf, p.pos.y);
        put_f64(buf, p.pos.z);
        buf.push_back(static_cast<char>(p.class_code));
        buf.push_back(static_cast<char>(p.has_rgb ? kPampFlagRgb : 0));
        if (p.has_rgb) {
            for (int c = 0; c < 3; ++c) {
                const float v = std::min(1.0f, std::max(0.0f, p.rgb[c]));
                buf.push_back(static_cast<char>(std::lround(v * 255.0f)));
            }
        }
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

// --- PPM / world file -----------------------------------------------------------

PpmImage read_ppm(std::istream& in) {
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (!in || m0 != 'P' || m1 != '6')
        throw FormatError(FormatErrorKind::BadMagic, "bad magic: not a binary PPM (P6)");
    PpmImage img;
    img.width = read_ppm_int(in);
    img.height = read_ppm_int(in);
    const int maxval = read_ppm_int(in);
    if (maxval != 255)
        throw FormatError(FormatErrorKind::Corrupt,
                          "unsupported PPM maxval " + std::to_string(maxval));
    if (img.width <= 0 || img.height <= 0)
        throw FormatError(FormatErrorKind::Corrupt, "PPM with empty dimensions");
    in.get();  // single whitespace byte before raster data

    const std::size_t n = static_cast<std::size_t>(img.width) * img.height * 3;
    std::vector<unsigned char> raw(n);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw FormatError(FormatErrorKind::Truncated, "truncated PPM raster data");
    img.pixels.resize(n);
    for (std::size_t i = 0; i < n; ++i) img.pixels[i] = static_cast<float>(raw[i]) / 255.0f;
    return img;
}

std::array<double, 6> read_world_file(std::istream& in) {
    std::array<double, 6> w{};
    for (int i = 0; i < 6; ++i) {
        if (!(in >> w[i]))
            throw FormatError(FormatErrorKind::Truncated, "world file: expected 6 reals");
    }
    // ESRI order: A (x-scale), D (row-rot), B (col-rot), E (y-scale), C, F.
    const double det = w[0] * w[3] - w[1] * w[2];
    if (det == 0.0)
        throw FormatError(FormatErrorKind::Corrupt, "world file transform is singular");
    return w;
}

OrthoImage load_ortho(const std::string& image_path) {
    std::ifstream img_in(image_path, std::ios::binary);
    if (!img_in) throw std::runtime_error("cannot open ortho image: " + image_path);
    PpmImage ppm = read_ppm(img_in);

    std::string wld_path = image_path;
    const auto dot = wld_path.find_last_of('.');
    if (dot != std::string::npos) wld_path.resize(dot);
    wld_path += ".wld";
    std::ifstream wld_in(wld_path);
    if (!wld_in) throw std::runtime_error("missing world file sidecar: " + wld_path);

    OrthoImage ortho;
    ortho.width = ppm.width;
    ortho.height = ppm.height;
    ortho.pixels = std::move(ppm.pixels);
    ortho.world_transform = read_world_file(wld_in);
    return ortho;
}

Rgb sample_albedo(const OrthoImage& img, double x, double y) {
    // World file convention: world = M * (col,row) + origin with
    // M = [[A,B],[D,E]]; stored order is A D B E C F.
    const double a = img.world_transform[0];
    const double d = img.world_transform[1];
    const double b = img.world_transform[2];
    const double e = img.world_transform[3];
    const double c = img.world_transform[4];
    const double f = img.world_transform[5];
    const double det = a * e - b * d;
    const double dx = x - c;
    const double dy = y - f;
    // Pre-clamp so the int casts below stay in range for any finite input.
    const double col = std::clamp((e * dx - b * dy) / det, -1.0, static_cast<double>(img.width));
    const double row = std::clamp((a * dy - d * dx) / det, -1.0, static_cast<double>(img.height));

    const auto clampi = [](int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); };
    const double fc = std::floor(col);
    const double fr = std::floor(row);
    const double tx = col - fc;
    const double ty = row - fr;
    const int x0 = clampi(static_cast<int>(fc), img.width - 1);
    const int x1 = clampi(static_cast<int>(fc) + 1, img.width - 1);
    const int y0 = clampi(static_cast<int>(fr), img.height - 1);
    const int y1 = clampi(static_cast<int>(fr) + 1, img.height - 1);

    const float* p00 = img.pixel(x0, y0);
    const float* p10 = img.pixel(x1, y0);
    const float* p01 = img.pixel(x0, y1);
    const float* p11 = img.pixel(x1, y1);
    Rgb out;
    for (int ch = 0; ch < 3; ++ch) {
        const double top = p00[ch] + (p10[ch] - p00[ch]) * tx;
        const double bot = p01[ch] + (p11[ch] - p01[ch]) * tx;
        out[ch] = static_cast<float>(clamp01(top + (bot - top) * ty));
    }
    return out;
}

}  // namespace pointamp
