#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <vector>

#include "oracles.hpp"
#include "pointamp/packets.hpp"
#include "pointamp/render.hpp"
#include "pointamp/sdf.hpp"
#include "pointamp/spatial.hpp"
#include "pointamp/synthetic.hpp"

using namespace pointamp;

namespace {

TemplateTable noise_free_table() {
    TemplateTable table = default_template_table();
    for (auto& params : table.per_class) params.noise_amplitude = 0.0;
    return table;
}

// Everything render_frame needs, with stable addresses for the spans and
// pointers SceneField keeps into its owner.
struct TestScene {
    PacketScene scene;
    TemplateTable table;
    MaterialTable materials = default_materials();
    SceneField field;
};

std::unique_ptr<TestScene> make_test_scene(std::vector<RawPoint> points, double cell_size,
                                           std::uint64_t seed, bool noise_free = false) {
    auto ts = std::make_unique<TestScene>();
    ts->table = noise_free ? noise_free_table() : default_template_table();
    const GridIndex index = build_grid(std::move(points), cell_size, 8);
    BuildParams params;
    params.global_seed = seed;
    params.scheme = "canonical";
    ts->scene.packets = build_packets(index, nullptr, ts->table, params);
    std::vector<Vec3> centers;
    std::vector<float> radii;
    for (const RenderPacket& pk : ts->scene.packets) {
        centers.push_back(pk.center);
        radii.push_back(pk.bounding_radius);
    }
    ts->scene.chunks = build_chunks(index, centers, radii);
    ts->field = make_scene_field(ts->scene.packets, ts->scene.chunks, ts->table);
    return ts;
}

// Pixel-center ray exactly as render_frame generates it.
struct PixelRay {
    Vec3 dir;
    double cos_f;
};

PixelRay pixel_ray(const Camera& cam, int px, int py) {
    const double tan_y = std::tan(cam.vertical_fov * 0.5);
    const double tan_x = tan_y * static_cast<double>(cam.width) / cam.height;
    const double sx = ((px + 0.5) / cam.width * 2.0 - 1.0) * tan_x;
    const double sy = (1.0 - (py + 0.5) / cam.height * 2.0) * tan_y;
    const double inv_norm = 1.0 / std::sqrt(sx * sx + sy * sy + 1.0);
    return {(cam.right * sx + cam.up * sy + cam.forward) * inv_norm, inv_norm};
}

PrevFrame constant_depth_prev(const Camera& cam, double depth) {
    const std::size_t n = static_cast<std::size_t>(cam.width) * cam.height;
    PrevFrame prev;
    prev.pyramid = DepthPyramid::build(std::vector<double>(n, depth), cam.width, cam.height);
    prev.camera = cam;
    return prev;
}

bool frames_identical(const FrameBuffers& a, const FrameBuffers& b) {
    return a.width == b.width && a.height == b.height && a.color == b.color &&
           a.depth == b.depth;
}

}  // namespace

TEST_CASE("validate_camera accepts the default and rejects broken setups") {
    Camera cam;
    CHECK_NOTHROW(validate_camera(cam));

    Camera skewed = cam;
    skewed.up = {0.1, 0.0, 1.0};
    CHECK_THROWS_AS(validate_camera(skewed), std::invalid_argument);

    Camera planes = cam;
    planes.near_plane = 10.0;
    planes.far_plane = 5.0;
    CHECK_THROWS_AS(validate_camera(planes), std::invalid_argument);

    Camera fov = cam;
    fov.vertical_fov = 0.0;
    CHECK_THROWS_AS(validate_camera(fov), std::invalid_argument);

    Camera viewport = cam;
    viewport.width = 0;
    CHECK_THROWS_AS(validate_camera(viewport), std::invalid_argument);
}

TEST_CASE("look_at builds an orthonormal frame toward the target") {
    const Camera cam = look_at({1.0, 2.0, 3.0}, {4.0, -1.0, 0.5}, 0.9, 0.1, 100.0, 64, 36);
    CHECK_NOTHROW(validate_camera(cam));
    const Vec3 want_fwd = normalized(Vec3{3.0, -3.0, -2.5});
    CHECK(length(cam.forward - want_fwd) < 1e-12);
    CHECK(cam.up.z > 0.0);  // up stays worldly upward for oblique views

    // Looking straight down, the default up hint is parallel to forward; a
    // fallback axis must kick in.
    const Camera down = look_at({0.0, 0.0, 10.0}, {0.0, 0.0, 0.0}, 0.9, 0.1, 100.0, 64, 36);
    CHECK_NOTHROW(validate_camera(down));
    CHECK(length(down.forward - Vec3{0.0, 0.0, -1.0}) < 1e-12);

    CHECK_THROWS_AS(look_at({1.0, 1.0, 1.0}, {1.0, 1.0, 1.0}, 0.9, 0.1, 100.0, 64, 36),
                    std::invalid_argument);
}

TEST_CASE("depth pyramid level sizes halve up to 1x1") {
    const DepthPyramid pyr = DepthPyramid::build(std::vector<double>(5 * 3, 1.0), 5, 3);
    REQUIRE(pyr.level_sizes.size() == 4);
    CHECK(pyr.level_sizes[0] == std::pair<int, int>{5, 3});
    CHECK(pyr.level_sizes[1] == std::pair<int, int>{3, 2});
    CHECK(pyr.level_sizes[2] == std::pair<int, int>{2, 1});
    CHECK(pyr.level_sizes[3] == std::pair<int, int>{1, 1});
}

TEST_CASE("depth pyramid max_over is a conservative rectangle max") {
    oracles::Rng rng(201);
    const int w = 37, h = 23;
    std::vector<double> depth(static_cast<std::size_t>(w) * h);
    double global_max = 0.0;
    for (auto& d : depth) {
        d = rng.in(0.0, 100.0);
        global_max = std::max(global_max, d);
    }
    const DepthPyramid pyr = DepthPyramid::build(depth, w, h);

    for (int trial = 0; trial < 500; ++trial) {
        int x0 = rng.index(w), x1 = rng.index(w);
        int y0 = rng.index(h), y1 = rng.index(h);
        if (x1 < x0) std::swap(x0, x1);
        if (y1 < y0) std::swap(y0, y1);
        double exact = 0.0;
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x)
                exact = std::max(exact, depth[static_cast<std::size_t>(y) * w + x]);
        const double got = pyr.max_over(x0, y0, x1, y1);
        CHECK(got >= exact);
        CHECK(got <= global_max);
    }
    CHECK(pyr.max_over(0, 0, w - 1, h - 1) == global_max);
}

TEST_CASE("project_quad contains every pixel whose ray hits the sphere") {
    const Camera cam = look_at({0.0, -6.0, 2.0}, {0.0, 0.0, 1.5}, 0.9, 0.1, 100.0, 64, 36);
    oracles::Rng rng(202);

    int spheres_with_hits = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const Vec3 c = rng.box({-8.0, -4.0, -4.0}, {8.0, 14.0, 8.0});
        const double r = rng.in(0.1, 2.0);
        // Keep the sphere fully in front of the image plane; the straddling
        // case is covered separately below.
        if (dot(c - cam.position, cam.forward) - r < 0.2) continue;

        const auto rect = project_quad(cam, c, r);
        bool any_hit = false;
        for (int py = 0; py < cam.height; ++py) {
            for (int px = 0; px < cam.width; ++px) {
                const PixelRay ray = pixel_ray(cam, px, py);
                const auto t = oracles::ray_sphere(cam.position, ray.dir, c, r);
                if (!t) continue;
                any_hit = true;
                REQUIRE_MESSAGE(rect.has_value(), "pixel hit but no rect at trial " << trial);
                CHECK(px >= rect->x0);
                CHECK(px <= rect->x1);
                CHECK(py >= rect->y0);
                CHECK(py <= rect->y1);
                const double fwd_depth = *t * ray.cos_f;
                CHECK(fwd_depth >= rect->depth_min - 1e-9);
                CHECK(fwd_depth <= rect->depth_max + 1e-9);
            }
        }
        if (any_hit) ++spheres_with_hits;
    }
    CHECK(spheres_with_hits > 50);  // the oracle actually exercised the claim
}

TEST_CASE("project_quad handles behind-camera and straddling spheres") {
    const Camera cam = look_at({0.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, 0.9, 0.1, 100.0, 64, 36);

    CHECK(!project_quad(cam, {0.0, -10.0, 0.0}, 1.0).has_value());
    CHECK(!project_quad(cam, {0.0, 50.0, 200.0}, 1.0).has_value());  // far above the frustum

    // A sphere enclosing the camera must cover the whole viewport.
    const auto rect = project_quad(cam, {0.0, 0.5, 0.0}, 2.0);
    REQUIRE(rect.has_value());
    CHECK(rect->x0 == 0);
    CHECK(rect->y0 == 0);
    CHECK(rect->x1 == cam.width - 1);
    CHECK(rect->y1 == cam.height - 1);
}

TEST_CASE("occlusion_test hides spheres behind the previous depth only") {
    const Camera cam = look_at({0.0, 0.0, 2.0}, {0.0, 10.0, 2.0}, 0.9, 0.1, 100.0, 64, 36);
    const PrevFrame prev = constant_depth_prev(cam, 5.0);

    // Entirely behind the wall depth and well inside the view.
    CHECK(occlusion_test(prev, {0.0, 10.0, 2.0}, 0.5));
    // In front of the wall depth.
    CHECK(!occlusion_test(prev, {0.0, 2.0, 2.0}, 0.5));
    // Behind in depth but outside the previous frustum: treated visible.
    CHECK(!occlusion_test(prev, {0.0, -10.0, 2.0}, 0.5));
    // Behind in depth but straddling the viewport edge: treated visible.
    CHECK(!occlusion_test(prev, {-8.0, 10.0, 2.0}, 4.0));
}

TEST_CASE("trace_pixel matches analytic sphere and capsule intersections") {
    auto sphere_scene = make_test_scene(
        [] {
            std::vector<RawPoint> pts(1);
            pts[0].pos = {0.0, 0.0, 0.0};
            pts[0].class_code = 4;  // building: noise-free by default
            return pts;
        }(),
        1.0, 0, /*noise_free=*/true);
    const double r = sphere_scene->table[CanonicalClass::Building].capsule_radius;
    const double step_scale = render_step_scale(sphere_scene->table);
    const std::uint32_t idx = 0;
    const std::span<const std::uint32_t> cands(&idx, 1);

    oracles::Rng rng(203);
    int hits = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const Vec3 origin = rng.direction() * rng.in(3.0, 8.0);
        const Vec3 aim = rng.direction() * (0.9 * r * rng.unit());
        const Vec3 dir = normalized(aim - origin);
        const auto want = oracles::ray_sphere(origin, dir, {0.0, 0.0, 0.0}, r);
        REQUIRE(want.has_value());

        const TraceResult tr =
            trace_pixel(sphere_scene->field, cands, origin, dir, 0.01, 50.0, step_scale);
        REQUIRE_MESSAGE(tr.hit, "false miss at trial " << trial);
        CHECK(std::abs(tr.t - *want) <= 2e-3);
        // Normal of a sphere is radial at the hit point.
        const Vec3 radial = normalized(origin + dir * tr.t);
        CHECK(dot(tr.normal, radial) > 0.999);
        ++hits;
    }
    CHECK(hits == 400);

    auto capsule_scene = make_test_scene(
        [] {
            std::vector<RawPoint> pts(2);
            pts[0].pos = {0.0, 0.0, 0.0};
            pts[1].pos = {2.0, 0.0, 1.0};
            pts[0].class_code = 3;
            pts[1].class_code = 3;
            return pts;
        }(),
        4.0, 0, /*noise_free=*/true);
    const double cr = capsule_scene->table[CanonicalClass::Vegetation].capsule_radius;
    const double cap_step = render_step_scale(capsule_scene->table);

    for (int trial = 0; trial < 400; ++trial) {
        const Vec3 origin = Vec3{1.0, 0.0, 0.5} + rng.direction() * rng.in(4.0, 9.0);
        const Vec3 aim = Vec3{1.0, 0.0, 0.5} + rng.direction() * (0.8 * cr * rng.unit());
        const Vec3 dir = normalized(aim - origin);
        // The two packets amplify into capsules meeting halfway at (1,0,0.5).
        const auto t0 = oracles::ray_capsule(origin, dir, {0.0, 0.0, 0.0}, {1.0, 0.0, 0.5}, cr);
        const auto t1 = oracles::ray_capsule(origin, dir, {2.0, 0.0, 1.0}, {1.0, 0.0, 0.5}, cr);
        double want = kEmptyFieldDistance;
        if (t0) want = std::min(want, *t0);
        if (t1) want = std::min(want, *t1);
        REQUIRE(want < kEmptyFieldDistance);

        const std::vector<std::uint32_t> both = {0, 1};
        const TraceResult tr =
            trace_pixel(capsule_scene->field, both, origin, dir, 0.01, 50.0, cap_step);
        REQUIRE_MESSAGE(tr.hit, "false miss at trial " << trial);
        // The smooth seam can only pull the surface toward the ray origin,
        // never push it past the analytic union.
        CHECK(tr.t <= want + 2e-3);
        const double blend_k = capsule_scene->table[CanonicalClass::Vegetation].blend_k;
        CHECK(tr.t >= want - blend_k - 2e-3);
        // Away from the seam the analytic distance must match tightly.
        const Vec3 hit = origin + dir * tr.t;
        if (length(hit - Vec3{1.0, 0.0, 0.5}) > 1.0) CHECK(std::abs(tr.t - want) <= 2e-3);
    }
}

TEST_CASE("trace_pixel skips rays that miss every candidate sphere") {
    auto scene = make_test_scene(
        [] {
            std::vector<RawPoint> pts(1);
            pts[0].pos = {0.0, 0.0, 0.0};
            pts[0].class_code = 4;
            return pts;
        }(),
        1.0, 0, /*noise_free=*/true);
    const std::uint32_t idx = 0;
    const std::span<const std::uint32_t> cands(&idx, 1);
    const double step_scale = render_step_scale(scene->table);
    const double bound = scene->scene.packets[0].bounding_radius;

    // Clear miss: no sphere contact, no field evaluations.
    const TraceResult miss = trace_pixel(scene->field, cands, {0.0, -5.0, bound + 1.0},
                                         {0.0, 1.0, 0.0}, 0.01, 50.0, step_scale);
    CHECK(!miss.hit);
    CHECK(!miss.reached_sphere);
    CHECK(miss.steps == 0);

    // Graze: passes within the bounding sphere but outside the surface.
    const double r = scene->table[CanonicalClass::Building].capsule_radius;
    const TraceResult graze = trace_pixel(scene->field, cands, {0.0, -5.0, r + 0.05},
                                          {0.0, 1.0, 0.0}, 0.01, 50.0, step_scale);
    CHECK(!graze.hit);
    CHECK(graze.reached_sphere);
    CHECK(graze.steps > 0);

    // Empty candidate list.
    const TraceResult none = trace_pixel(scene->field, {}, {0.0, -5.0, 0.0}, {0.0, 1.0, 0.0},
                                         0.01, 50.0, step_scale);
    CHECK(!none.hit);
    CHECK(!none.reached_sphere);
}

TEST_CASE("shade evaluates lambert plus blinn terms clamped to unit range") {
    Material mat;
    mat.diffuse = {0.5f, 0.25f, 1.0f};
    mat.specular = 0.0f;
    mat.roughness = 1.0f;
    SdfSample sample;
    sample.albedo = {1.0f, 1.0f, 0.5f};

    const Vec3 n{0.0, 0.0, 1.0};
    const Vec3 l = normalized(Vec3{0.0, 1.0, 1.0});

    // Pure diffuse: albedo * diffuse * (n . l).
    const Rgb lit = shade(sample, n, n, l, mat);
    const float nl = static_cast<float>(dot(n, l));
    CHECK(lit[0] == doctest::Approx(1.0f * 0.5f * nl).epsilon(1e-6));
    CHECK(lit[1] == doctest::Approx(1.0f * 0.25f * nl).epsilon(1e-6));
    CHECK(lit[2] == doctest::Approx(0.5f * 1.0f * nl).epsilon(1e-6));

    // Light behind the surface: black.
    const Rgb dark = shade(sample, n, n, {0.0, 0.0, -1.0}, mat);
    CHECK(dark == Rgb{0.0f, 0.0f, 0.0f});

    // Specular adds along the half vector and the sum clamps at 1.
    mat.specular = 50.0f;
    mat.roughness = 0.2f;
    const Rgb bright = shade(sample, n, n, n, mat);
    for (const float c : bright) {
        CHECK(c <= 1.0f);
        CHECK(c >= 0.0f);
    }
    CHECK(bright[0] == 1.0f);  // saturated by the huge specular weight
}

TEST_CASE("render_frame over an empty scene is pure background") {
    const TemplateTable table = default_template_table();
    const SceneField field = make_scene_field({}, {}, table);  // no packets
    const Camera cam = look_at({0.0, -5.0, 2.0}, {0.0, 0.0, 1.0}, 0.9, 0.1, 50.0, 48, 32);
    RenderSettings settings;
    const RenderOutput out =
        render_frame(field, {}, default_materials(), cam, settings, nullptr);

    CHECK(out.stats.total_packets == 0);
    CHECK(out.stats.rays_marched == 0);
    for (const double d : out.frame.depth) CHECK(d == cam.far_plane);

    // Sky gradient: the zenith color has less red than the horizon color, so
    // the top row must read redder... less red than the bottom row.
    const Rgb top = out.frame.color[24];
    const Rgb bottom = out.frame.color[static_cast<std::size_t>(31) * 48 + 24];
    CHECK(top[0] < bottom[0]);
    CHECK(top != bottom);
}

TEST_CASE("render_frame depth matches geometry on the optical axis") {
    std::vector<RawPoint> pts(1);
    pts[0].pos = {0.0, 0.0, 0.0};
    pts[0].class_code = 4;
    auto scene = make_test_scene(std::move(pts), 1.0, 0, /*noise_free=*/true);

    // 65x37 viewport: the middle pixel's ray runs exactly along forward.
    const Camera cam = look_at({0.0, -6.0, 0.0}, {0.0, 1.0, 0.0}, 0.9, 0.1, 50.0, 65, 37);
    RenderSettings settings;
    settings.threads = 1;
    const RenderOutput out = render_frame(scene->field, scene->scene.chunks,
                                          scene->materials, cam, settings, nullptr);

    const double r = scene->table[CanonicalClass::Building].capsule_radius;
    const double center_depth = out.frame.depth[static_cast<std::size_t>(18) * 65 + 32];
    CHECK(std::abs(center_depth - (6.0 - r)) <= 5e-3);
    CHECK(out.frame.depth[0] == cam.far_plane);  // corner ray misses
    CHECK(out.stats.traced == 1);
    CHECK(out.stats.rays_marched > 0);
}

TEST_CASE("render_frame output is identical across thread counts and reruns") {
    auto scene = make_test_scene(synthetic_tile(600, 18.0, 77), 1.0, 77);
    const Camera cam = look_at({9.0, -14.0, 10.0}, {9.0, 9.0, 0.0}, 0.9, 0.1, 100.0, 96, 64);

    RenderSettings settings;
    settings.threads = 1;
    const RenderOutput a = render_frame(scene->field, scene->scene.chunks, scene->materials,
                                        cam, settings, nullptr);
    const RenderOutput a2 = render_frame(scene->field, scene->scene.chunks, scene->materials,
                                         cam, settings, nullptr);
    settings.threads = 5;
    const RenderOutput b = render_frame(scene->field, scene->scene.chunks, scene->materials,
                                        cam, settings, nullptr);

    CHECK(frames_identical(a.frame, a2.frame));
    CHECK(frames_identical(a.frame, b.frame));
    CHECK(a.stats.rays_marched == b.stats.rays_marched);
    CHECK(a.stats.average_steps == b.stats.average_steps);
}

TEST_CASE("second static frame with culling equals the no-cull reference") {
    // Tile in view plus clutter behind the camera, so at least the frustum
    // stage provably removes something.
    std::vector<RawPoint> pts = synthetic_tile(800, 20.0, 31);
    const std::vector<RawPoint> rear = synthetic_scatter(
        40, {0.0, -60.0, 0.0}, {20.0, -40.0, 5.0}, CanonicalClass::Building, 31);
    pts.insert(pts.end(), rear.begin(), rear.end());
    auto scene = make_test_scene(std::move(pts), 1.0, 31);
    const Camera cam = look_at({10.0, -12.0, 9.0}, {10.0, 10.0, 0.0}, 0.9, 0.1, 120.0, 80, 48);

    RenderSettings no_cull;
    no_cull.cull_chunks = no_cull.cull_frustum = no_cull.cull_occlusion = false;
    const RenderOutput first =
        render_frame(scene->field, scene->scene.chunks, scene->materials, cam, no_cull, nullptr);

    PrevFrame prev;
    prev.pyramid = DepthPyramid::build(first.frame.depth, first.frame.width, first.frame.height);
    prev.camera = cam;

    RenderSettings culled;  // all stages on
    const RenderOutput second = render_frame(scene->field, scene->scene.chunks, scene->materials,
                                             cam, culled, &prev);
    const RenderOutput reference = render_frame(scene->field, scene->scene.chunks,
                                                scene->materials, cam, no_cull, &prev);

    CHECK(frames_identical(second.frame, reference.frame));
    CHECK(frames_identical(second.frame, first.frame));  // static camera, static scene
    CHECK(second.stats.total_packets == reference.stats.total_packets);
    CHECK(second.stats.traced < second.stats.total_packets);  // culling did something
}

TEST_CASE("cull statistics attribute packets to the stage that removed them") {
    // Scene strictly behind the camera.
    std::vector<RawPoint> pts = synthetic_scatter(50, {-5.0, -30.0, 0.0}, {5.0, -20.0, 5.0},
                                                  CanonicalClass::Building, 9);
    auto scene = make_test_scene(std::move(pts), 2.0, 9);
    const Camera cam = look_at({0.0, 0.0, 2.0}, {0.0, 10.0, 2.0}, 0.9, 0.1, 100.0, 64, 36);

    RenderSettings settings;
    settings.cull_chunks = false;  // expose per-packet frustum attribution
    RenderOutput out = render_frame(scene->field, scene->scene.chunks, scene->materials, cam,
                                    settings, nullptr);
    CHECK(out.stats.total_packets == 50);
    CHECK(out.stats.frustum_culled == 50);
    CHECK(out.stats.chunk_culled == 0);
    CHECK(out.stats.traced == 0);

    settings.cull_chunks = true;
    out = render_frame(scene->field, scene->scene.chunks, scene->materials, cam, settings,
                       nullptr);
    CHECK(out.stats.chunk_culled == 50);
    CHECK(out.stats.traced == 0);

    // Reference mode still renders (and rejects) everything per ray.
    RenderSettings reference;
    reference.cull_chunks = reference.cull_frustum = reference.cull_occlusion = false;
    out = render_frame(scene->field, scene->scene.chunks, scene->materials, cam, reference,
                       nullptr);
    CHECK(out.stats.traced == 50);
    CHECK(out.stats.rays_marched == 0);  // behind the camera: no sphere contact
}

TEST_CASE("cull statistics partition the packet count") {
    auto scene = make_test_scene(synthetic_tile(1000, 40.0, 55), 1.5, 55);
    const Camera cam = look_at({5.0, -10.0, 6.0}, {20.0, 20.0, 0.0}, 0.9, 0.1, 60.0, 64, 36);
    RenderSettings settings;
    const RenderOutput out =
        render_frame(scene->field, scene->scene.chunks, scene->materials, cam, settings, nullptr);
    CHECK(out.stats.total_packets == 1000);
    CHECK(out.stats.chunk_culled + out.stats.frustum_culled + out.stats.occlusion_culled +
              out.stats.traced ==
          out.stats.total_packets);
}

TEST_CASE("render_frame rejects a previous frame of the wrong size") {
    const TemplateTable table = default_template_table();
    const SceneField field = make_scene_field({}, {}, table);
    const Camera cam = look_at({0.0, -5.0, 2.0}, {0.0, 0.0, 1.0}, 0.9, 0.1, 50.0, 48, 32);
    const Camera small = look_at({0.0, -5.0, 2.0}, {0.0, 0.0, 1.0}, 0.9, 0.1, 50.0, 24, 16);
    PrevFrame prev = constant_depth_prev(small, 5.0);
    prev.camera = cam;  // dimensions now disagree with the pyramid
    CHECK_THROWS_AS(render_frame(field, {}, default_materials(), cam, RenderSettings{}, &prev),
                    std::invalid_argument);
}

TEST_CASE("cull stats line format is stable") {
    CullStats stats;
    stats.total_packets = 10;
    stats.chunk_culled = 2;
    stats.frustum_culled = 3;
    stats.occlusion_culled = 1;
    stats.traced = 4;
    stats.rays_marched = 100;
    stats.average_steps = 1.5;
    CHECK(stats.to_line() ==
          "total=10 chunk_culled=2 frustum_culled=3 occlusion_culled=1 traced=4 rays=100 "
          "avg_steps=1.500");
}

TEST_CASE("write_ppm emits exact header and rounded bytes") {
    FrameBuffers frame;
    frame.width = 2;
    frame.height = 1;
    frame.color = {Rgb{0.0f, 0.5f, 1.0f}, Rgb{-0.25f, 2.0f, 128.4f / 255.0f}};
    frame.depth = {1.0, 1.0};

    std::ostringstream out(std::ios::binary);
    write_ppm(out, frame);
    const std::string bytes = out.str();
    const std::string header = "P6\n2 1\n255\n";
    REQUIRE(bytes.size() == header.size() + 6);
    CHECK(bytes.substr(0, header.size()) == header);
    const unsigned char* px = reinterpret_cast<const unsigned char*>(bytes.data() + header.size());
    CHECK(px[0] == 0);
    CHECK(px[1] == 128);  // floor(0.5 * 255 + 0.5)
    CHECK(px[2] == 255);
    CHECK(px[3] == 0);    // clamped below
    CHECK(px[4] == 255);  // clamped above
    CHECK(px[5] == 128);  // floor(128.4 + 0.5)
}
