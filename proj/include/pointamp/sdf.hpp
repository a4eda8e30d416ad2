#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pointamp/math.hpp"
#include "pointamp/packets.hpp"
#include "pointamp/templates.hpp"

namespace pointamp {

// Field value at a point plus the shading data of whichever contributor was
// nearest before blending.
struct SdfSample {
    double distance = 0.0;
    std::uint16_t material_id = 0;
    Rgb albedo{1.0f, 1.0f, 1.0f};
};

// Field value reported when no packet is in range. Large but finite so
// downstream arithmetic stays well defined.
inline constexpr double kEmptyFieldDistance = 1.0e9;

// Exact signed distance to the capsule with axis a-b and radius r. a == b
// degenerates to a sphere.
double sd_capsule(const Vec3& p, const Vec3& a, const Vec3& b, double r);

// Polynomial smooth minimum with seam width k (k == 0 is a hard min).
// Result is within [min(d1,d2) - k/4, min(d1,d2)].
double smooth_min(double d1, double d2, double k);

// Deterministic fractal value noise in [-1, 1]. Octave o contributes weight
// 2^-o at frequency * 2^o; the sum is renormalized to the unit range.
// Integer-hash lattice, so identical inputs match across platforms.
double fbm_noise(std::uint64_t seed, const Vec3& p, double frequency, int octaves);

// Signed field of one packet. ground_height is the local ground reference
// used by the surface classes (Ground/Grass/Road plane height, grass taper).
SdfSample packet_sdf(const RenderPacket& packet, const TemplateTable& table,
                     double ground_height, const Vec3& p);

// A packet set prepared for field evaluation: per-packet ground references
// resolved once, plus the largest seam width for conservative bounds.
struct SceneField {
    std::span<const RenderPacket> packets;
    const TemplateTable* table = nullptr;
    std::vector<double> ground_heights;  // one per packet
    // One per packet: the packet's field at p never drops below
    // |p - center| - reach_radii[i]. Derived from the template geometry,
    // cluster seam sag, and noise amplitude, so it holds for any packet data.
    std::vector<double> reach_radii;
    double max_blend_k = 0.0;

    SdfSample sample_packet(std::uint32_t idx, const Vec3& p) const {
        return packet_sdf(packets[idx], *table, ground_heights[idx], p);
    }
};

// Resolves ground references: surface-class packets use their own center
// height; others take the nearest Ground packet center (XY distance, ties to
// the lower index) in their chunk, falling back to the scene's lowest center.
// Also fills reach_radii from the template table and adjacency offsets.
SceneField make_scene_field(std::span<const RenderPacket> packets,
                            std::span<const Chunk> chunks, const TemplateTable& table);

// Smooth-min fold of the candidate packets' fields, in ascending candidate
// order, each joined with its own class seam width. Empty candidate set
// yields kEmptyFieldDistance. The fold never rises above the pointwise
// minimum and never drops more than max_blend_k below it.
SdfSample scene_sdf(const SceneField& field, std::span<const std::uint32_t> candidates,
                    const Vec3& p);

// Convenience fold over every packet in the field.
SdfSample scene_sdf(const SceneField& field, const Vec3& p);

// Normalized central-difference gradient of a scalar field functor; +z when
// the raw gradient is degenerate.
template <typename F>
Vec3 sdf_gradient(F&& field, const Vec3& p, double h = 1e-4) {
    const Vec3 g{
        (field(Vec3{p.x + h, p.y, p.z}) - field(Vec3{p.x - h, p.y, p.z})) / (2.0 * h),
        (field(Vec3{p.x, p.y + h, p.z}) - field(Vec3{p.x, p.y - h, p.z})) / (2.0 * h),
        (field(Vec3{p.x, p.y, p.z + h}) - field(Vec3{p.x, p.y, p.z - h})) / (2.0 * h),
    };
    const double len = length(g);
    if (len > 1e-12) return g / len;
    return Vec3{0.0, 0.0, 1.0};
}

// True for classes rendered as a local height-field patch rather than a
// capsule cluster.
constexpr bool is_surface_class(CanonicalClass c) {
    return c == CanonicalClass::Ground || c == CanonicalClass::Grass ||
           c == CanonicalClass::Road;
}

}  // namespace pointamp
