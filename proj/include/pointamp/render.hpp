#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pointamp/math.hpp"
#include "pointamp/packets.hpp"
#include "pointamp/sdf.hpp"

namespace pointamp {

inline constexpr double kHitEps = 1e-3;  // m, surface proximity at a hit
inline constexpr int kMaxSteps = 256;
inline constexpr int kTileSize = 16;  // px, tiles render independently

struct Camera {
    Vec3 position{};
    Vec3 right{1.0, 0.0, 0.0};
    Vec3 up{0.0, 0.0, 1.0};
    Vec3 forward{0.0, 1.0, 0.0};
    double vertical_fov = 0.9;  // rad
    double near_plane = 0.1;    // m
    double far_plane = 300.0;   // m
    int width = 640;
    int height = 360;
};

// Throws std::invalid_argument on non-orthonormal basis (1e-9 tolerance),
// bad planes, fov outside (0, pi), or an empty viewport.
void validate_camera(const Camera& camera);

Camera look_at(const Vec3& position, const Vec3& target, double vertical_fov, double near_plane,
               double far_plane, int width, int height, const Vec3& up_hint = Vec3{0.0, 0.0, 1.0});

struct FrameBuffers {
    int width = 0;
    int height = 0;
    std::vector<Rgb> color;     // row-major, row 0 at the top
    std::vector<double> depth;  // planar forward depth in [near, far]; far = miss
};

// Max-depth mip chain over a depth buffer; level 0 is the buffer itself,
// each level halves (rounding up) until 1x1.
struct DepthPyramid {
    int width = 0;
    int height = 0;
    std::vector<std::vector<double>> levels;
    std::vector<std::pair<int, int>> level_sizes;

    static DepthPyramid build(const std::vector<double>& depth, int width, int height);

    // Conservative max over an inclusive level-0 texel rect: reads the level
    // where the rect spans at most 2x2 texels.
    double max_over(int x0, int y0, int x1, int y1) const;
};

// Previous frame's depth seen from the previous camera, for reprojection
// occlusion queries.
struct PrevFrame {
    DepthPyramid pyramid;
    Camera camera;
};

struct CullStats {
    std::uint64_t total_packets = 0;
    std::uint64_t chunk_culled = 0;      // skipped with a chunk outside the frustum
    std::uint64_t frustum_culled = 0;    // individually outside the frustum
    std::uint64_t occlusion_culled = 0;  // behind previous-frame depth (chunk or packet)
    std::uint64_t traced = 0;
    std::uint64_t rays_marched = 0;
    double average_steps = 0.0;

    std::string to_line() const;
};

struct ScreenRect {
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1;  // inclusive pixel bounds
    double depth_min = 0.0;                // forward depth of sphere near side
    double depth_max = 0.0;

    bool empty() const { return x1 < x0 || y1 < y0; }
};

// Conservative pixel rectangle covering a sphere's projection, clamped to
// the viewport, plus its forward depth range. Absent when the sphere lies
// entirely outside the view frustum or covers no pixel center.
std::optional<ScreenRect> project_quad(const Camera& camera, const Vec3& center, double radius);

// True when the sphere was fully behind previous-frame depth. Any part
// off-screen or reaching the image plane in the previous view counts as
// visible, which keeps the test conservative for a static camera.
bool occlusion_test(const PrevFrame& prev, const Vec3& center, double radius);

enum class ChunkCull { Keep, Frustum, Occluded };

// margin widens the chunk sphere so packets near the boundary keep their
// blend contributions; pass max_blend_k + 2*hit_eps.
ChunkCull cull_chunk(const Camera& camera, const Chunk& chunk, double margin,
                     const PrevFrame* prev);

struct TraceResult {
    bool hit = false;
    bool reached_sphere = false;  // ray intersected at least one candidate sphere
    double t = 0.0;
    SdfSample sample;
    Vec3 normal{0.0, 0.0, 1.0};
    int steps = 0;  // field evaluations; clearance-driven advances are free
};

// Sphere-traces the joint field of the candidate packets (ascending index
// order) along origin + t*dir, t in [t_near, t_far]. Rays that miss every
// candidate sphere return without evaluating the field; elsewhere the march
// folds only the packets whose bounding spheres overlap the current point,
// which leaves the surface unchanged because every other candidate joins as
// an exact no-op. A sign crossing is resolved by bisection, so hit points
// satisfy |field| <= 2*hit_eps.
TraceResult trace_pixel(const SceneField& field, std::span<const std::uint32_t> candidates,
                        const Vec3& origin, const Vec3& dir, double t_near, double t_far,
                        double step_scale);

// Lambert + Blinn specular, single directional light, clamped to [0,1].
Rgb shade(const SdfSample& sample, const Vec3& normal, const Vec3& view_dir,
          const Vec3& light_dir, const Material& material);

// Scene-wide safe step factor: 1 / (1 + max over classes of
// noise_amplitude * noise_frequency * 3).
double render_step_scale(const TemplateTable& table);

struct RenderSettings {
    Rgb background_zenith{0.45f, 0.62f, 0.85f};
    Rgb background_horizon{0.82f, 0.88f, 0.95f};
    Vec3 light_dir{0.35, 0.25, 0.90};  // toward the light; normalized internally
    bool cull_chunks = true;
    bool cull_frustum = true;
    bool cull_occlusion = true;
    int threads = 1;  // 0 = auto; POINTAMP_THREADS overrides
};

struct RenderOutput {
    FrameBuffers frame;
    CullStats stats;
};

// Renders one frame: chunk culling, per-packet culling and tile binning,
// then parallel per-tile tracing. Output is identical for any thread count
// and, from the second frame of a static camera on, identical with and
// without culling.
RenderOutput render_frame(const SceneField& field, std::span<const Chunk> chunks,
                          const MaterialTable& materials, const Camera& camera,
                          const RenderSettings& settings, const PrevFrame* prev);

// Binary PPM (P6, maxval 255), rows top to bottom, rounding half-up.
void write_ppm(std::ostream& out, const FrameBuffers& frame);

}  // namespace pointamp
