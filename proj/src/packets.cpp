#include "pointamp/packets.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "binary_io.hpp"
#include "pointamp/parallel.hpp"

namespace pointamp {

std::uint64_t packet_seed(std::uint64_t global_seed, const Vec3& center) {
    auto quantize = [](double v) {
        return static_cast<std::uint64_t>(static_cast<std::int64_t>(std::llround(v * 1000.0)));
    };
    std::uint64_t h = hash_combine(global_seed, quantize(center.x));
    h = hash_combine(h, quantize(center.y));
    return hash_combine(h, quantize(center.z));
}

// Sphere outside which the packet's field is provably positive: geometric
// reach, plus the largest possible noise push, plus the packet's own
// smooth-min sag (strictly below blend_k), plus slack.
float packet_bounding_radius(const RenderPacket& packet, const TemplateParams& tp) {
    double max_offset = 0.0;
    double max_half_offset = 0.0;
    for (int i = 0; i < packet.adjacency_count; ++i) {
        const double len = length(to_vec3(packet.adjacency[i]));
        max_offset = std::max(max_offset, len);
        max_half_offset = std::max(max_half_offset, 0.5 * len);
    }
    double reach;
    if (packet.cls == CanonicalClass::Ground || packet.cls == CanonicalClass::Grass ||
        packet.cls == CanonicalClass::Road) {
        reach = std::max(tp.capsule_radius, max_offset);
    } else if (packet.cls == CanonicalClass::Unknown) {
        reach = tp.capsule_radius;
    } else {
        reach = max_half_offset + tp.capsule_radius + tp.noise_amplitude;
    }
    return static_cast<float>(reach + tp.blend_k + 1e-3);
}

std::vector<RenderPacket> build_packets(const GridIndex& index, const OrthoImage* ortho,
                                        const TemplateTable& templates,
                                        const BuildParams& params) {
    if (!(params.radius_max > 0.0))
        throw std::invalid_argument("build_packets: radius_max must be > 0");
    const ClassMap& cmap = class_map(params.scheme);
    const std::size_t n = index.points.size();

    // Reclassification happens before adjacency so neighbor search links
    // points that will render with the same template.
    std::vector<CanonicalClass> classes(n);
    for (std::size_t i = 0; i < n; ++i)
        classes[i] = cmap.table[index.points[i].class_code];
    for (std::size_t i = 0; i < n; ++i)
        if (classes[i] == CanonicalClass::Ground) classes[i] = params.ground_as;
    if (params.low_veg_grass_height >= 0.0) {
        // Column floor = lowest point sharing the grid cell's XY footprint.
        std::unordered_map<std::uint64_t, double> column_floor;
        auto column_key = [&](const Vec3& pos) {
            const CellCoord c = index.cell_of(pos);
            return hash_combine(static_cast<std::uint64_t>(c.x),
                                static_cast<std::uint64_t>(c.y));
        };
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint64_t key = column_key(index.points[i].pos);
            auto [it, fresh] = column_floor.try_emplace(key, index.points[i].pos.z);
            if (!fresh) it->second = std::min(it->second, index.points[i].pos.z);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (classes[i] != CanonicalClass::Vegetation) continue;
            const double floor_z = column_floor.at(column_key(index.points[i].pos));
            if (index.points[i].pos.z - floor_z <= params.low_veg_grass_height)
                classes[i] = CanonicalClass::Grass;
        }
    }

    std::vector<RenderPacket> packets(n);
    const std::span<const CanonicalClass> class_span(classes);
    parallel_for(n, resolve_threads(params.threads), [&](std::size_t i) {
        const RawPoint& point = index.points[i];
        RenderPacket& packet = packets[i];
        packet.center = point.pos;
        packet.cls = classes[i];
        packet.material_id = static_cast<std::uint16_t>(classes[i]);
        packet.seed = packet_seed(params.global_seed, point.pos);

        const auto neighbors =
            knn_same_class(index, static_cast<std::uint32_t>(i), 8, params.radius_max, class_span);
        packet.adjacency_count = static_cast<std::uint8_t>(neighbors.size());
        for (std::size_t j = 0; j < neighbors.size(); ++j)
            packet.adjacency[j] = to_vec3f(index.points[neighbors[j]].pos - point.pos);

        Rgb albedo{1.0f, 1.0f, 1.0f};
        if (ortho != nullptr) {
            albedo = sample_albedo(*ortho, point.pos.x, point.pos.y);
        } else if (point.has_rgb) {
            albedo = point.rgb;
        }
        for (int c = 0; c < 3; ++c)
            packet.albedo[c] =
                static_cast<std::uint8_t>(std::lround(std::clamp(albedo[c], 0.0f, 1.0f) * 255.0f));

        packet.bounding_radius = packet_bounding_radius(packet, templates[packet.cls]);
    });
    return packets;
}

void write_packets(std::ostream& out, const PacketScene& scene) {
    std::string buf;
    buf.append("PKT1");
    buf.push_back(1);
    detail::put_u64(buf, scene.packets.size());
    detail::put_u64(buf, scene.chunks.size());
    detail::put_u64(buf, scene.global_seed);
    detail::put_f64(buf, scene.cell_size);
    detail::put_u32(buf, scene.chunk_factor);

    for (const RenderPacket& p : scene.packets) {
        detail::put_f64(buf, p.center.x);
        detail::put_f64(buf, p.center.y);
        detail::put_f64(buf, p.center.z);
        buf.push_back(static_cast<char>(p.adjacency_count));
        for (int i = 0; i < p.adjacency_count; ++i) {
            detail::put_f32(buf, p.adjacency[i].x);
            detail::put_f32(buf, p.adjacency[i].y);
            detail::put_f32(buf, p.adjacency[i].z);
        }
        buf.push_back(static_cast<char>(p.cls));
        detail::put_u16(buf, p.material_id);
        for (int c = 0; c < 3; ++c) buf.push_back(static_cast<char>(p.albedo[c]));
        detail::put_f32(buf, p.bounding_radius);
        detail::put_u64(buf, p.seed);
    }

    for (const Chunk& ch : scene.chunks) {
        detail::put_i64(buf, ch.coord.x);
        detail::put_i64(buf, ch.coord.y);
        detail::put_i64(buf, ch.coord.z);
        for (const Vec3* v : {&ch.aabb_min, &ch.aabb_max, &ch.sphere_center}) {
            detail::put_f64(buf, v->x);
            detail::put_f64(buf, v->y);
            detail::put_f64(buf, v->z);
        }
        detail::put_f64(buf, ch.sphere_radius);
        detail::put_u32(buf, static_cast<std::uint32_t>(ch.packet_indices.size()));
        for (std::uint32_t idx : ch.packet_indices) detail::put_u32(buf, idx);
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

PacketScene read_packets(std::istream& in) {
    const std::string bytes = detail::slurp(in);
    detail::ByteCursor cur{reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size()};

    cur.need(4, "magic");
    if (std::string_view(bytes.data(), 4) != "PKT1")
        throw FormatError(FormatErrorKind::BadMagic, "not a packet file (bad magic)");
    cur.pos = 4;
    const std::uint8_t version = cur.u8("version");
    if (version != 1)
        throw FormatError(FormatErrorKind::BadVersion,
                          "unsupported packet file version " + std::to_string(version));

    PacketScene scene;
    const std::uint64_t packet_count = cur.u64("packet count");
    const std::uint64_t chunk_count = cur.u64("chunk count");
    scene.global_seed = cur.u64("global seed");
    scene.cell_size = cur.f64("cell size");
    scene.chunk_factor = cur.u32("chunk factor");
    if (!std::isfinite(scene.cell_size) || scene.cell_size <= 0.0)
        throw FormatError(FormatErrorKind::Corrupt, "non-positive cell size");
    if (scene.chunk_factor < 1)
        throw FormatError(FormatErrorKind::Corrupt, "zero chunk factor");

    scene.packets.reserve(std::min<std::uint64_t>(packet_count, 1 << 20));
    for (std::uint64_t i = 0; i < packet_count; ++i) {
        RenderPacket p;
        p.center = Vec3{cur.f64("center"), cur.f64("center"), cur.f64("center")};
        if (!std::isfinite(p.center.x) || !std::isfinite(p.center.y) ||
            !std::isfinite(p.center.z))
            throw FormatError(FormatErrorKind::Corrupt, "non-finite packet center");
        p.adjacency_count = cur.u8("adjacency count");
        if (p.adjacency_count > 8)
            throw FormatError(FormatErrorKind::Corrupt, "adjacency count exceeds 8");
        for (int j = 0; j < p.adjacency_count; ++j) {
            p.adjacency[j] =
                Vec3f{cur.f32("adjacency"), cur.f32("adjacency"), cur.f32("adjacency")};
            if (!std::isfinite(p.adjacency[j].x) || !std::isfinite(p.adjacency[j].y) ||
                !std::isfinite(p.adjacency[j].z))
                throw FormatError(FormatErrorKind::Corrupt, "non-finite adjacency offset");
        }
        const std::uint8_t cls = cur.u8("class");
        if (cls >= kClassCount)
            throw FormatError(FormatErrorKind::Corrupt, "class value out of range");
        p.cls = static_cast<CanonicalClass>(cls);
        p.material_id = cur.u16("material id");
        for (int c = 0; c < 3; ++c) p.albedo[c] = cur.u8("albedo");
        p.bounding_radius = cur.f32("bounding radius");
        if (!std::isfinite(p.bounding_radius) || p.bounding_radius < 0.0f)
            throw FormatError(FormatErrorKind::Corrupt, "invalid bounding radius");
        p.seed = cur.u64("seed");
        scene.packets.push_back(p);
    }

    scene.chunks.reserve(std::min<std::uint64_t>(chunk_count, 1 << 20));
    for (std::uint64_t i = 0; i < chunk_count; ++i) {
        Chunk ch;
        ch.coord = CellCoord{cur.i64("chunk coord"), cur.i64("chunk coord"),
                             cur.i64("chunk coord")};
        for (Vec3* v : {&ch.aabb_min, &ch.aabb_max, &ch.sphere_center}) {
            v->x = cur.f64("chunk box");
            v->y = cur.f64("chunk box");
            v->z = cur.f64("chunk box");
            if (!std::isfinite(v->x) || !std::isfinite(v->y) || !std::isfinite(v->z))
                throw FormatError(FormatErrorKind::Corrupt, "non-finite chunk geometry");
        }
        ch.sphere_radius = cur.f64("chunk radius");
        if (!std::isfinite(ch.sphere_radius) || ch.sphere_radius < 0.0)
            throw FormatError(FormatErrorKind::Corrupt, "invalid chunk radius");
        const std::uint32_t count = cur.u32("chunk packet count");
        ch.packet_indices.reserve(std::min<std::uint32_t>(count, 1 << 20));
        for (std::uint32_t j = 0; j < count; ++j) {
            const std::uint32_t idx = cur.u32("chunk packet index");
            if (idx >= packet_count)
                throw FormatError(FormatErrorKind::Corrupt, "chunk references missing packet");
            ch.packet_indices.push_back(idx);
        }
        scene.chunks.push_back(std::move(ch));
    }
    if (cur.pos != bytes.size())
        throw FormatError(FormatErrorKind::Corrupt, "trailing bytes after packet data");
    return scene;
}

}  // namespace pointamp
