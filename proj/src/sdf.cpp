#include "pointamp/sdf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>

#include "pointamp/spatial.hpp"

namespace pointamp {

double sd_capsule(const Vec3& p, const Vec3& a, const Vec3& b, double r) {
    const Vec3 pa = p - a;
    const Vec3 ba = b - a;
    const double bb = dot(ba, ba);
    const double h = bb > 0.0 ? std::clamp(dot(pa, ba) / bb, 0.0, 1.0) : 0.0;
    return length(pa - ba * h) - r;
}

double smooth_min(double d1, double d2, double k) {
    const double m = std::min(d1, d2);
    if (k <= 0.0) return m;
    const double h = std::max(k - std::abs(d1 - d2), 0.0) / k;
    return m - h * h * k * 0.25;
}

namespace {

// Hashed lattice value in [-1, 1]. int64 cell coordinates go through the
// shared mixer as raw two's-complement words.
double lattice_value(std::uint64_t seed, std::int64_t ix, std::int64_t iy, std::int64_t iz) {
    std::uint64_t h = seed;
    h = hash_combine(h, static_cast<std::uint64_t>(ix));
    h = hash_combine(h, static_cast<std::uint64_t>(iy));
    h = hash_combine(h, static_cast<std::uint64_t>(iz));
    return static_cast<double>(h >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

double smoothstep01(double t) { return t * t * (3.0 - 2.0 * t); }

// Single octave of trilinear value noise at lattice scale.
double value_noise(std::uint64_t seed, const Vec3& q) {
    const double fx = std::floor(q.x);
    const double fy = std::floor(q.y);
    const double fz = std::floor(q.z);
    const auto ix = static_cast<std::int64_t>(fx);
    const auto iy = static_cast<std::int64_t>(fy);
    const auto iz = static_cast<std::int64_t>(fz);
    const double ux = smoothstep01(q.x - fx);
    const double uy = smoothstep01(q.y - fy);
    const double uz = smoothstep01(q.z - fz);

    double corners[2][2][2];
    for (int dz = 0; dz < 2; ++dz)
        for (int dy = 0; dy < 2; ++dy)
            for (int dx = 0; dx < 2; ++dx)
                corners[dz][dy][dx] = lattice_value(seed, ix + dx, iy + dy, iz + dz);

    auto mix = [](double a, double b, double t) { return a + (b - a) * t; };
    const double x00 = mix(corners[0][0][0], corners[0][0][1], ux);
    const double x10 = mix(corners[0][1][0], corners[0][1][1], ux);
    const double x01 = mix(corners[1][0][0], corners[1][0][1], ux);
    const double x11 = mix(corners[1][1][0], corners[1][1][1], ux);
    const double y0 = mix(x00, x10, uy);
    const double y1 = mix(x01, x11, uy);
    return mix(y0, y1, uz);
}

}  // namespace

double fbm_noise(std::uint64_t seed, const Vec3& p, double frequency, int octaves) {
    double sum = 0.0;
    double weight = 1.0;
    double freq = frequency;
    double norm = 0.0;
    for (int o = 0; o < octaves; ++o) {
        sum += weight * value_noise(hash_combine(seed, static_cast<std::uint64_t>(o)), p * freq);
        norm += weight;
        weight *= 0.5;
        freq *= 2.0;
    }
    return sum / norm;
}

namespace {

// Largest cached neighbor offset; used to size surface patches so adjacent
// patches tile without gaps.
double max_offset_length(const RenderPacket& packet) {
    double m = 0.0;
    for (int i = 0; i < packet.adjacency_count; ++i)
        m = std::max(m, length(to_vec3(packet.adjacency[i])));
    return m;
}

double capsule_cluster(const RenderPacket& packet, const TemplateParams& tp, const Vec3& p) {
    if (packet.adjacency_count == 0)
        return length(p - packet.center) - tp.capsule_radius;
    double acc = kEmptyFieldDistance;
    for (int i = 0; i < packet.adjacency_count; ++i) {
        const Vec3 tip = packet.center + to_vec3(packet.adjacency[i]) * 0.5;
        acc = smooth_min(acc, sd_capsule(p, packet.center, tip, tp.capsule_radius), tp.blend_k);
    }
    return acc;
}

// Field value of one packet, or proof that it stays at or above cutoff.
// Returns false (leaving *out untouched) only when geometry alone bounds the
// value at p to >= cutoff; the noise term is then never evaluated. When the
// noise is evaluated the result is identical to the unbounded field, so a
// cutoff of +infinity turns this into the plain packet field.
// len_pc is the caller's length(p - packet.center).
//
// Surface classes: plane at the ground reference, displaced by (possibly
// height-tapered) noise, intersected with a disc of the packet's reach so the
// field stays inside the bounding sphere. The taper weight never exceeds
// 1 + taper * depth / amplitude below ground, so amp * w bounds the
// displacement magnitude from either side.
bool packet_distance_cutoff(const RenderPacket& packet, const TemplateParams& tp,
                            double ground_height, const Vec3& p, double len_pc,
                            double cutoff, double* out) {
    if (is_surface_class(packet.cls)) {
        const double patch_radius = std::max(tp.capsule_radius, max_offset_length(packet));
        const double disc = len_pc - patch_radius;
        const double plane0 = p.z - ground_height;
        double amp_w = 0.0;
        if (tp.noise_amplitude > 0.0) {
            double w = 1.0;
            if (tp.taper > 0.0)
                w = std::max(0.0, 1.0 - tp.taper * plane0 / tp.noise_amplitude);
            amp_w = tp.noise_amplitude * w;
        }
        if (std::max(plane0 - amp_w, disc) >= cutoff) return false;
        if (disc >= plane0 + amp_w) {
            // The disc term dominates any displaced plane; the max below
            // would return disc no matter what the noise evaluates to.
            *out = disc;
            return true;
        }
        double displacement = 0.0;
        if (amp_w != 0.0)
            displacement = amp_w * fbm_noise(packet.seed, p, tp.noise_frequency, tp.octaves);
        *out = std::max(plane0 - displacement, disc);
        return true;
    }
    if (packet.cls == CanonicalClass::Unknown) {
        // Small bump: sphere cut to the upper half-space at the center height.
        *out = std::max(len_pc - tp.capsule_radius, packet.center.z - p.z);
        return true;
    }
    double d = capsule_cluster(packet, tp, p);
    if (tp.noise_amplitude > 0.0) {
        if (d - tp.noise_amplitude >= cutoff) return false;
        d -= tp.noise_amplitude * fbm_noise(packet.seed, p, tp.noise_frequency, tp.octaves);
    }
    *out = d;
    return true;
}

}  // namespace

SdfSample packet_sdf(const RenderPacket& packet, const TemplateTable& table,
                     double ground_height, const Vec3& p) {
    double d = 0.0;
    packet_distance_cutoff(packet, table[packet.cls], ground_height, p,
                           length(p - packet.center),
                           std::numeric_limits<double>::infinity(), &d);
    return SdfSample{d, packet.material_id,
                     Rgb{packet.albedo[0] / 255.0f, packet.albedo[1] / 255.0f,
                         packet.albedo[2] / 255.0f}};
}

SceneField make_scene_field(std::span<const RenderPacket> packets,
                            std::span<const Chunk> chunks, const TemplateTable& table) {
    SceneField field;
    field.packets = packets;
    field.table = &table;
    field.max_blend_k = table.max_blend_k();
    field.ground_heights.assign(packets.size(), 0.0);
    if (packets.empty()) return field;

    double lowest = std::numeric_limits<double>::infinity();
    for (const RenderPacket& pk : packets) lowest = std::min(lowest, pk.center.z);

    // Defaults stand on their own so the field works without chunk data;
    // the chunk loop refines non-surface packets to their local ground.
    for (std::size_t i = 0; i < packets.size(); ++i)
        field.ground_heights[i] =
            is_surface_class(packets[i].cls) ? packets[i].center.z : lowest;

    // Reach radii: surface patches are cut by a noise-free disc of the patch
    // radius; the Unknown bump is a plain sphere; capsule clusters extend to
    // the farthest half-offset tip, sag up to blend_k/4 per smooth join, and
    // the noise lowers the field by at most its amplitude.
    field.reach_radii.assign(packets.size(), 0.0);
    for (std::size_t i = 0; i < packets.size(); ++i) {
        const RenderPacket& pk = packets[i];
        const TemplateParams& tp = table[pk.cls];
        double reach = tp.capsule_radius;
        if (is_surface_class(pk.cls)) {
            reach = std::max(tp.capsule_radius, max_offset_length(pk));
        } else if (pk.cls != CanonicalClass::Unknown) {
            reach += tp.noise_amplitude;
            if (pk.adjacency_count > 0)
                reach += 0.5 * max_offset_length(pk) + 0.25 * tp.blend_k * pk.adjacency_count;
        }
        field.reach_radii[i] = reach;
    }

    for (const Chunk& chunk : chunks) {
        std::vector<std::uint32_t> grounds;
        for (std::uint32_t idx : chunk.packet_indices)
            if (packets[idx].cls == CanonicalClass::Ground) grounds.push_back(idx);

        for (std::uint32_t idx : chunk.packet_indices) {
            const RenderPacket& pk = packets[idx];
            if (is_surface_class(pk.cls)) {
                field.ground_heights[idx] = pk.center.z;
                continue;
            }
            double best_d2 = std::numeric_limits<double>::infinity();
            double best_z = lowest;
            for (std::uint32_t g : grounds) {
                const Vec3 d = packets[g].center - pk.center;
                const double d2 = d.x * d.x + d.y * d.y;
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best_z = packets[g].center.z;
                }
            }
            field.ground_heights[idx] = best_z;
        }
    }
    return field;
}

SdfSample scene_sdf(const SceneField& field, std::span<const std::uint32_t> candidates,
                    const Vec3& p) {
    SdfSample out;
    out.distance = kEmptyFieldDistance;
    out.material_id = 0;
    out.albedo = Rgb{1.0f, 1.0f, 1.0f};

    double acc = kEmptyFieldDistance;
    double nearest = kEmptyFieldDistance;
    for (std::uint32_t idx : candidates) {
        const RenderPacket& pk = field.packets[idx];
        const TemplateParams& tp = (*field.table)[pk.cls];
        // A contributor whose value provably stays blend_k above the running
        // fold joins as an exact no-op (smooth_min degenerates to the
        // unchanged minimum) and cannot be the nearest contributor either, so
        // it is skipped without evaluation. reach_radii makes
        // len - reach a valid lower bound for any packet data.
        const double cutoff = std::max(acc + tp.blend_k, nearest);
        const double len = length(p - pk.center);
        if (len - field.reach_radii[idx] >= cutoff) continue;
        double d;
        if (!packet_distance_cutoff(pk, tp, field.ground_heights[idx], p, len, cutoff, &d))
            continue;
        acc = smooth_min(acc, d, tp.blend_k);
        if (d < nearest) {
            nearest = d;
            out.material_id = pk.material_id;
            out.albedo = Rgb{pk.albedo[0] / 255.0f, pk.albedo[1] / 255.0f,
                             pk.albedo[2] / 255.0f};
        }
    }
    out.distance = acc;
    return out;
}

SdfSample scene_sdf(const SceneField& field, const Vec3& p) {
    std::vector<std::uint32_t> all(field.packets.size());
    for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
    return scene_sdf(field, all, p);
}

}  // namespace pointamp
