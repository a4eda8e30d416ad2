#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "pointamp/math.hpp"
#include "pointamp/spatial.hpp"
#include "pointamp/templates.hpp"

namespace pointamp {

// Self-contained per-point rendering descriptor: the point's canonical
// class, up to eight cached neighbor offsets, material/shading data, and a
// sphere bound outside which its field is guaranteed positive.
struct RenderPacket {
    Vec3 center;
    std::uint8_t adjacency_count = 0;
    std::array<Vec3f, 8> adjacency{};  // neighbor - center, meters
    CanonicalClass cls = CanonicalClass::Unknown;
    std::uint16_t material_id = 0;
    std::array<std::uint8_t, 3> albedo{255, 255, 255};
    float bounding_radius = 0.0f;
    std::uint64_t seed = 0;

    bool operator==(const RenderPacket& o) const {
        if (center != o.center || adjacency_count != o.adjacency_count || cls != o.cls ||
            material_id != o.material_id || albedo != o.albedo ||
            bounding_radius != o.bounding_radius || seed != o.seed)
            return false;
        for (int i = 0; i < adjacency_count; ++i)
            if (adjacency[i] != o.adjacency[i]) return false;
        return true;
    }
};

struct Material {
    Rgb diffuse{0.8f, 0.8f, 0.8f};
    float specular = 0.0f;
    float roughness = 1.0f;
};

using MaterialTable = std::array<Material, kClassCount>;

// Default class -> material assignment; material_id equals the class value.
MaterialTable default_materials();

// Applies `material.<class>.<field> = value` overrides (same templates.cfg
// stream as the template loader; non-material keys are ignored here).
void apply_material_config(MaterialTable& materials, std::istream& in);

// Pure function of the global seed and the center quantized to 1 mm; gives
// every packet reproducible procedural variation.
std::uint64_t packet_seed(std::uint64_t global_seed, const Vec3& center);

// Sphere radius outside which the packet's field is guaranteed positive:
// geometric reach plus the worst-case noise push plus the smooth-min sag.
float packet_bounding_radius(const RenderPacket& packet, const TemplateParams& tp);

struct BuildParams {
    std::uint64_t global_seed = 0;
    double radius_max = 3.0;  // m, adjacency search radius
    std::string scheme = "dales";
    // Ground returns carry no grass/road granularity in DALES; this picks
    // the template they render with.
    CanonicalClass ground_as = CanonicalClass::Ground;
    // Reclassify vegetation returns within this height of the lowest point
    // in their grid cell column as grass; <0 disables.
    double low_veg_grass_height = -1.0;
    int threads = 1;
};

// One packet per point, in point order, byte-deterministic for fixed inputs
// regardless of thread count.
std::vector<RenderPacket> build_packets(const GridIndex& index, const OrthoImage* ortho,
                                        const TemplateTable& templates,
                                        const BuildParams& params);

// Loaded .pkt content.
struct PacketScene {
    std::vector<RenderPacket> packets;
    std::vector<Chunk> chunks;
    std::uint64_t global_seed = 0;
    double cell_size = 1.0;
    std::uint32_t chunk_factor = 8;
};

// .pkt container: header (magic "PKT1", u8 version, u64 packet count,
// u64 chunk count, u64 global_seed, f64 cell_size, u32 chunk_factor),
// packet records, chunk records. Little-endian, fixed field order;
// read(write(x)) == x byte-exactly.
void write_packets(std::ostream& out, const PacketScene& scene);
PacketScene read_packets(std::istream& in);

}  // namespace pointamp
