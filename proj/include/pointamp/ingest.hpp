#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pointamp/math.hpp"

namespace pointamp {

// Canonical surface classes driving template dispatch. Values are stable:
// they are written as-is into the packet format.
enum class CanonicalClass : std::uint8_t {
    Ground = 0,
    Grass = 1,
    Road = 2,
    Vegetation = 3,
    Building = 4,
    Pole = 5,
    Fence = 6,
    Vehicle = 7,
    PowerLine = 8,
    Unknown = 9,
};

inline constexpr int kClassCount = 10;

std::string_view class_name(CanonicalClass c);
std::optional<CanonicalClass> class_from_name(std::string_view name);

// One LiDAR return. Coordinates are meters in a shared local frame; the
// vendor class code is kept verbatim so canonical mapping stays a separate,
// swappable step. RGB is stored as unit-interval floats; the binary format
// quantizes to 8 bits, so parser output is always of the form k/255.
struct RawPoint {
    Vec3 pos;
    std::uint8_t class_code = 0;
    bool has_rgb = false;
    Rgb rgb{0.0f, 0.0f, 0.0f};
    // Carried for callers that attach sensor intensity; not persisted by
    // either file format.
    std::optional<float> intensity;

    bool operator==(const RawPoint& o) const {
        return pos == o.pos && class_code == o.class_code && has_rgb == o.has_rgb &&
               (!has_rgb || rgb == o.rgb);
    }
};

// Registered vendor-code -> canonical-class table. Total over 0-255.
struct ClassMap {
    std::array<CanonicalClass, 256> table;
};

// Maps a vendor class code under a registered scheme ("dales" built in).
// Throws std::invalid_argument for unregistered scheme names.
CanonicalClass map_class(std::uint8_t class_code, std::string_view scheme = "dales");
const ClassMap& class_map(std::string_view scheme);
void register_class_map(std::string name, ClassMap map);

// Top-down georegistered image. world_transform holds the six world-file
// parameters in ESRI line order: x-scale, row-rotation, col-rotation,
// y-scale, x-origin, y-origin; it maps pixel (col,row) centers to world
// meters.
struct OrthoImage {
    int width = 0;
    int height = 0;
    std::vector<float> pixels;  // row-major RGB, unit interval
    std::array<double, 6> world_transform{1.0, 0.0, 0.0, -1.0, 0.0, 0.0};

    const float* pixel(int x, int y) const { return &pixels[(static_cast<std::size_t>(y) * width + x) * 3]; }
};

// --- .xyzc text format ------------------------------------------------------
// One record per line: `x y z class [r g b]`, '#' starts a comment line.

std::vector<RawPoint> parse_xyzc(std::istream& in);
void write_xyzc(std::ostream& out, std::span<const RawPoint> points);

// --- .pamp packed binary format ----------------------------------------------
// magic "PAMP", u8 version=1, LE u64 count, then per record
// f64 x, f64 y, f64 z, u8 class, u8 flags; flags bit0 => 3x u8 RGB follows.

std::vector<RawPoint> parse_pamp(std::istream& in);
void write_pamp(std::ostream& out, std::span<const RawPoint> points);

// --- ortho image ingestion ----------------------------------------------------

// Binary PPM (P6, maxval 255). Values are mapped to [0,1] as v/255.
struct PpmImage {
    int width = 0;
    int height = 0;
    std::vector<float> pixels;
};

PpmImage read_ppm(std::istream& in);

// Six reals, one per line, ESRI ordering. Throws FormatError when the
// transform is singular (x-scale * y-scale == rotation product).
std::array<double, 6> read_world_file(std::istream& in);

// Loads `<image>.ppm` plus its `<image>.wld` sidecar.
OrthoImage load_ortho(const std::string& image_path);

// Bilinear albedo lookup at world meters (x, y); coordinates outside the
// image clamp to the border pixel. Total over all finite inputs.
Rgb sample_albedo(const OrthoImage& img, double x, double y);

}  // namespace pointamp
