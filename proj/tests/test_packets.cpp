#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "pointamp/error.hpp"
#include "pointamp/packets.hpp"
#include "pointamp/spatial.hpp"
#include "pointamp/synthetic.hpp"

using namespace pointamp;

namespace {

PacketScene build_scene(std::vector<RawPoint> points, const BuildParams& params,
                        double cell_size = 1.5, const OrthoImage* ortho = nullptr) {
    const TemplateTable table = default_template_table();
    PacketScene scene;
    const GridIndex index = build_grid(std::move(points), cell_size, 8);
    scene.packets = build_packets(index, ortho, table, params);
    std::vector<Vec3> centers;
    std::vector<float> radii;
    for (const RenderPacket& pk : scene.packets) {
        centers.push_back(pk.center);
        radii.push_back(pk.bounding_radius);
    }
    scene.chunks = build_chunks(index, centers, radii);
    scene.global_seed = params.global_seed;
    scene.cell_size = cell_size;
    scene.chunk_factor = 8;
    return scene;
}

BuildParams canonical_params() {
    BuildParams params;
    params.scheme = "canonical";
    return params;
}

PacketScene random_scene(std::uint64_t seed, std::size_t count) {
    oracles::Rng rng(seed);
    std::vector<RawPoint> points(count);
    for (auto& p : points) {
        p.pos = rng.box({-20.0, -20.0, -5.0}, {20.0, 20.0, 15.0});
        p.class_code = static_cast<std::uint8_t>(rng.index(kClassCount));
        if (rng.unit() < 0.5) {
            p.has_rgb = true;
            for (auto& c : p.rgb) c = static_cast<float>(rng.index(256)) / 255.0f;
        }
    }
    BuildParams params = canonical_params();
    params.global_seed = seed;
    return build_scene(std::move(points), params);
}

std::string packets_bytes(const PacketScene& scene) {
    std::ostringstream out(std::ios::binary);
    write_packets(out, scene);
    return out.str();
}

}  // namespace

TEST_CASE("packet_seed quantizes centers to a millimeter") {
    const std::uint64_t a = packet_seed(7, {0.0001, 0.0, 0.0});
    CHECK(packet_seed(7, {0.0004, 0.0, 0.0}) == a);   // same millimeter
    CHECK(packet_seed(7, {0.001, 0.0, 0.0}) != a);    // next millimeter
    CHECK(packet_seed(8, {0.0001, 0.0, 0.0}) != a);   // seed matters
    CHECK(packet_seed(7, {0.0, 0.001, 0.0}) != packet_seed(7, {0.001, 0.0, 0.0}));  // axes ordered
}

TEST_CASE("build_packets emits one packet per point in point order") {
    std::vector<RawPoint> points = synthetic_tile(400, 30.0, 5);
    const std::vector<RawPoint> original = points;
    const PacketScene scene = build_scene(std::move(points), canonical_params());
    REQUIRE(scene.packets.size() == original.size());
    for (std::size_t i = 0; i < original.size(); ++i) {
        CHECK(scene.packets[i].center == original[i].pos);
        CHECK(static_cast<int>(scene.packets[i].cls) == original[i].class_code);
        CHECK(scene.packets[i].material_id == original[i].class_code);
        CHECK(scene.packets[i].seed == packet_seed(0, original[i].pos));
    }
}

TEST_CASE("adjacency offsets match brute-force neighbors") {
    std::vector<RawPoint> points = synthetic_tile(500, 25.0, 21);
    BuildParams params = canonical_params();
    params.radius_max = 3.0;
    const GridIndex index = build_grid(points, 1.5, 8);
    const auto packets = build_packets(index, nullptr, default_template_table(), params);

    std::vector<CanonicalClass> classes(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        classes[i] = map_class(points[i].class_code, "canonical");

    for (std::uint32_t i = 0; i < points.size(); ++i) {
        const auto want = oracles::brute_knn_same_class(points, classes, i, 8, 3.0);
        REQUIRE(packets[i].adjacency_count == want.size());
        for (std::size_t a = 0; a < want.size(); ++a) {
            const Vec3f off = to_vec3f(points[want[a]].pos - points[i].pos);
            CHECK(packets[i].adjacency[a] == off);
        }
    }
}

TEST_CASE("build_packets output is identical across thread counts") {
    std::vector<RawPoint> points = synthetic_tile(800, 30.0, 31);
    const GridIndex index = build_grid(std::move(points), 1.5, 8);
    BuildParams params = canonical_params();
    params.global_seed = 3;

    params.threads = 1;
    const auto lone = build_packets(index, nullptr, default_template_table(), params);
    params.threads = 5;
    const auto pooled = build_packets(index, nullptr, default_template_table(), params);
    REQUIRE(lone.size() == pooled.size());
    for (std::size_t i = 0; i < lone.size(); ++i) CHECK(lone[i] == pooled[i]);
}

TEST_CASE("albedo prefers ortho color over point color over white") {
    std::vector<RawPoint> points(3);
    points[0].pos = {0.5, 0.5, 0.0};  // white: no color anywhere
    points[1].pos = {0.5, 0.5, 1.0};
    points[1].has_rgb = true;
    points[1].rgb = {10.0f / 255.0f, 20.0f / 255.0f, 30.0f / 255.0f};
    points[2].pos = {0.5, 0.5, 2.0};
    for (auto& p : points) p.class_code = 4;

    const PacketScene plain = build_scene(points, canonical_params());
    CHECK(plain.packets[0].albedo == std::array<std::uint8_t, 3>{255, 255, 255});
    CHECK(plain.packets[1].albedo == std::array<std::uint8_t, 3>{10, 20, 30});

    // A 1x1 ortho image: every lookup lands on its single pixel.
    OrthoImage ortho;
    ortho.width = 1;
    ortho.height = 1;
    ortho.pixels = {40.0f / 255.0f, 50.0f / 255.0f, 60.0f / 255.0f};
    ortho.world_transform = {1.0, 0.0, 0.0, -1.0, 0.0, 0.0};
    const PacketScene with_ortho =
        build_scene(points, canonical_params(), 1.5, &ortho);
    for (const RenderPacket& pk : with_ortho.packets)
        CHECK(pk.albedo == std::array<std::uint8_t, 3>{40, 50, 60});
}

TEST_CASE("ground_as reassigns the template class of ground returns") {
    std::vector<RawPoint> points(2);
    points[0].pos = {0.0, 0.0, 0.0};
    points[0].class_code = 0;  // canonical ground
    points[1].pos = {5.0, 0.0, 0.0};
    points[1].class_code = 3;

    BuildParams params = canonical_params();
    params.ground_as = CanonicalClass::Grass;
    const PacketScene scene = build_scene(points, params);
    CHECK(scene.packets[0].cls == CanonicalClass::Grass);
    CHECK(scene.packets[0].material_id == static_cast<int>(CanonicalClass::Grass));
    CHECK(scene.packets[1].cls == CanonicalClass::Vegetation);
}

TEST_CASE("low vegetation reclassifies as grass against the column floor") {
    std::vector<RawPoint> points(4);
    points[0].pos = {0.2, 0.2, 0.0};  // ground return fixes the column floor
    points[0].class_code = 0;
    points[1].pos = {0.3, 0.3, 0.4};  // low vegetation
    points[1].class_code = 3;
    points[2].pos = {0.25, 0.25, 3.0};  // canopy stays vegetation
    points[2].class_code = 3;
    points[3].pos = {40.0, 40.0, 8.0};  // alone in its column: its own floor
    points[3].class_code = 3;

    BuildParams params = canonical_params();
    params.low_veg_grass_height = 0.5;
    const PacketScene scene = build_scene(points, params, 1.0);
    CHECK(scene.packets[0].cls == CanonicalClass::Ground);
    CHECK(scene.packets[1].cls == CanonicalClass::Grass);
    CHECK(scene.packets[2].cls == CanonicalClass::Vegetation);
    CHECK(scene.packets[3].cls == CanonicalClass::Grass);

    // Adjacency runs after reclassification: the grass packet must not link
    // to the remaining vegetation.
    CHECK(scene.packets[1].adjacency_count == 0);

    params.low_veg_grass_height = -1.0;
    const PacketScene off = build_scene(points, params, 1.0);
    CHECK(off.packets[1].cls == CanonicalClass::Vegetation);
}

TEST_CASE("bounding radius covers reach, noise, and seam sag") {
    const TemplateTable table = default_template_table();
    RenderPacket pk;
    pk.cls = CanonicalClass::Vegetation;
    pk.adjacency_count = 1;
    pk.adjacency[0] = {2.0f, 0.0f, 0.0f};
    const TemplateParams& tp = table[pk.cls];
    const float want = static_cast<float>(1.0 + tp.capsule_radius + tp.noise_amplitude +
                                          tp.blend_k + 1e-3);
    CHECK(packet_bounding_radius(pk, tp) == want);
}

TEST_CASE("packet scenes round-trip through the binary format") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const PacketScene scene = random_scene(seed, 300);
        const std::string bytes = packets_bytes(scene);

        std::istringstream in(bytes, std::ios::binary);
        const PacketScene back = read_packets(in);

        REQUIRE(back.packets.size() == scene.packets.size());
        for (std::size_t i = 0; i < scene.packets.size(); ++i)
            CHECK(back.packets[i] == scene.packets[i]);
        REQUIRE(back.chunks.size() == scene.chunks.size());
        for (std::size_t i = 0; i < scene.chunks.size(); ++i) {
            CHECK(back.chunks[i].coord == scene.chunks[i].coord);
            CHECK(back.chunks[i].aabb_min == scene.chunks[i].aabb_min);
            CHECK(back.chunks[i].aabb_max == scene.chunks[i].aabb_max);
            CHECK(back.chunks[i].sphere_center == scene.chunks[i].sphere_center);
            CHECK(back.chunks[i].sphere_radius == scene.chunks[i].sphere_radius);
            CHECK(back.chunks[i].packet_indices == scene.chunks[i].packet_indices);
        }
        CHECK(back.global_seed == scene.global_seed);
        CHECK(back.cell_size == scene.cell_size);
        CHECK(back.chunk_factor == scene.chunk_factor);

        // Byte-exact the other way around too.
        CHECK(packets_bytes(back) == bytes);
    }
}

TEST_CASE("read_packets rejects malformed input") {
    const PacketScene scene = random_scene(17, 50);
    std::string bytes = packets_bytes(scene);

    {
        std::string bad = bytes;
        bad[0] = 'X';
        std::istringstream in(bad, std::ios::binary);
        CHECK_THROWS_AS(read_packets(in), FormatError);
    }
    {
        std::string bad = bytes;
        bad[4] = 9;  // version byte
        std::istringstream in(bad, std::ios::binary);
        try {
            read_packets(in);
            FAIL("expected FormatError");
        } catch (const FormatError& e) {
            CHECK(e.kind() == FormatErrorKind::BadVersion);
        }
    }
    for (const std::size_t cut : {3UL, 12UL, 40UL, bytes.size() - 1}) {
        std::istringstream in(bytes.substr(0, cut), std::ios::binary);
        CHECK_THROWS_AS(read_packets(in), FormatError);
    }
}

TEST_CASE("material overrides parse from the shared config stream") {
    MaterialTable materials = default_materials();
    std::istringstream cfg(
        "# comment\n"
        "material.vehicle.diffuse_r = 0.25\n"
        "material.vehicle.specular = 0.5\n"
        "material.grass.roughness = 0.125\n");
    apply_material_config(materials, cfg);
    CHECK(materials[static_cast<int>(CanonicalClass::Vehicle)].diffuse[0] == 0.25f);
    CHECK(materials[static_cast<int>(CanonicalClass::Vehicle)].specular == 0.5f);
    CHECK(materials[static_cast<int>(CanonicalClass::Grass)].roughness == 0.125f);

    std::istringstream bad("material.vehicle.shimmer = 1\n");
    CHECK_THROWS_AS(apply_material_config(materials, bad), ParseError);
}
