#include "pointamp/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "pointamp/parallel.hpp"

namespace pointamp {

namespace {

// Minimum march advance; pushes rays through grazing approaches where the
// field value alone would stall. Any surface crossing it causes is caught by
// the sign check and resolved by bisection.
constexpr double kStepFloor = 1e-4;
constexpr int kBisectIters = 48;
// Clearance beyond which candidate-sphere distance alone drives the step and
// the field is not evaluated.
constexpr double kBoundSkipSlack = 0.2;

struct CameraFrame {
    double tan_x;
    double tan_y;
};

CameraFrame camera_frame(const Camera& cam) {
    const double tan_y = std::tan(cam.vertical_fov * 0.5);
    return {tan_y * (static_cast<double>(cam.width) / cam.height), tan_y};
}

Vec3 to_camera(const Camera& cam, const Vec3& world) {
    const Vec3 rel = world - cam.position;
    return Vec3{dot(rel, cam.right), dot(rel, cam.up), dot(rel, cam.forward)};
}

// Per-axis view-slope interval covering every point of a sphere that lies
// fully in front of the image plane (cz > r).
void slope_interval(double c, double cz, double r, double& lo, double& hi) {
    hi = (c + r >= 0.0) ? (c + r) / (cz - r) : (c + r) / (cz + r);
    lo = (c - r <= 0.0) ? (c - r) / (cz - r) : (c - r) / (cz + r);
}

struct SphereProjection {
    bool whole_screen = false;  // sphere reaches the image plane
    double px_lo = 0.0, px_hi = 0.0;  // fractional pixel bounds, unclamped
    double py_lo = 0.0, py_hi = 0.0;
    double depth_min = 0.0, depth_max = 0.0;
};

// Absent = sphere entirely outside the view frustum.
std::optional<SphereProjection> project_sphere(const Camera& cam, const Vec3& center,
                                               double r) {
    const CameraFrame f = camera_frame(cam);
    const Vec3 c = to_camera(cam, center);
    if (c.z + r < cam.near_plane || c.z - r > cam.far_plane) return std::nullopt;
    const double nx = std::sqrt(1.0 + f.tan_x * f.tan_x);
    const double ny = std::sqrt(1.0 + f.tan_y * f.tan_y);
    if ((c.x + f.tan_x * c.z) / nx < -r) return std::nullopt;
    if ((-c.x + f.tan_x * c.z) / nx < -r) return std::nullopt;
    if ((c.y + f.tan_y * c.z) / ny < -r) return std::nullopt;
    if ((-c.y + f.tan_y * c.z) / ny < -r) return std::nullopt;

    SphereProjection out;
    out.depth_min = c.z - r;
    out.depth_max = c.z + r;
    if (c.z - r <= 1e-9) {
        out.whole_screen = true;
        return out;
    }
    double lo_x, hi_x, lo_y, hi_y;
    slope_interval(c.x, c.z, r, lo_x, hi_x);
    slope_interval(c.y, c.z, r, lo_y, hi_y);
    out.px_lo = (lo_x / f.tan_x + 1.0) * 0.5 * cam.width - 0.5;
    out.px_hi = (hi_x / f.tan_x + 1.0) * 0.5 * cam.width - 0.5;
    out.py_lo = (1.0 - hi_y / f.tan_y) * 0.5 * cam.height - 0.5;
    out.py_hi = (1.0 - lo_y / f.tan_y) * 0.5 * cam.height - 0.5;
    return out;
}

Rgb background_color(const RenderSettings& s, const Vec3& dir) {
    const auto a = static_cast<float>(clamp01(0.5 * (dir.z + 1.0)));
    Rgb out;
    for (int c = 0; c < 3; ++c)
        out[c] = s.background_horizon[c] + (s.background_zenith[c] - s.background_horizon[c]) * a;
    return out;
}

}  // namespace

void validate_camera(const Camera& c) {
    auto require = [](bool ok, const char* msg) {
        if (!ok) throw std::invalid_argument(msg);
    };
    require(c.width > 0 && c.height > 0, "camera: empty viewport");
    require(c.near_plane > 0.0 && c.near_plane < c.far_plane, "camera: need 0 < near < far");
    require(c.vertical_fov > 0.0 && c.vertical_fov < std::numbers::pi,
            "camera: vertical fov outside (0, pi)");
    constexpr double tol = 1e-9;
    require(std::abs(length(c.right) - 1.0) <= tol && std::abs(length(c.up) - 1.0) <= tol &&
                std::abs(length(c.forward) - 1.0) <= tol,
            "camera: basis vectors must be unit length");
    require(std::abs(dot(c.right, c.up)) <= tol && std::abs(dot(c.right, c.forward)) <= tol &&
                std::abs(dot(c.up, c.forward)) <= tol,
            "camera: basis vectors must be orthogonal");
}

Camera look_at(const Vec3& position, const Vec3& target, double vertical_fov, double near_plane,
               double far_plane, int width, int height, const Vec3& up_hint) {
    Camera cam;
    cam.position = position;
    Vec3 fwd = target - position;
    if (length(fwd) < 1e-12) throw std::invalid_argument("look_at: target equals position");
    fwd = normalized(fwd);
    Vec3 right = cross(fwd, up_hint);
    if (length(right) < 1e-9) right = cross(fwd, Vec3{0.0, 1.0, 0.0});
    if (length(right) < 1e-9) right = cross(fwd, Vec3{1.0, 0.0, 0.0});
    right = normalized(right);
    cam.right = right;
    cam.up = cross(right, fwd);
    cam.forward = fwd;
    cam.vertical_fov = vertical_fov;
    cam.near_plane = near_plane;
    cam.far_plane = far_plane;
    cam.width = width;
    cam.height = height;
    validate_camera(cam);
    return cam;
}

DepthPyramid DepthPyramid::build(const std::vector<double>& depth, int width, int height) {
    if (width <= 0 || height <= 0 ||
        depth.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw std::invalid_argument("DepthPyramid: dimensions do not match buffer");
    DepthPyramid p;
    p.width = width;
    p.height = height;
    p.levels.push_back(depth);
    p.level_sizes.emplace_back(width, height);
    int w = width;
    int h = height;
    while (w > 1 || h > 1) {
        const int nw = std::max(1, (w + 1) / 2);
        const int nh = std::max(1, (h + 1) / 2);
        const std::vector<double>& src = p.levels.back();
        std::vector<double> dst(static_cast<std::size_t>(nw) * nh,
                                -std::numeric_limits<double>::infinity());
        for (int y = 0; y < nh; ++y) {
            for (int x = 0; x < nw; ++x) {
                double m = -std::numeric_limits<double>::infinity();
                for (int dy = 0; dy < 2; ++dy) {
                    for (int dx = 0; dx < 2; ++dx) {
                        const int sx = std::min(2 * x + dx, w - 1);
                        const int sy = std::min(2 * y + dy, h - 1);
                        m = std::max(m, src[static_cast<std::size_t>(sy) * w + sx]);
                    }
                }
                dst[static_cast<std::size_t>(y) * nw + x] = m;
            }
        }
        p.levels.push_back(std::move(dst));
        p.level_sizes.emplace_back(nw, nh);
        w = nw;
        h = nh;
    }
    return p;
}

double DepthPyramid::max_over(int x0, int y0, int x1, int y1) const {
    x0 = std::clamp(x0, 0, width - 1);
    x1 = std::clamp(x1, 0, width - 1);
    y0 = std::clamp(y0, 0, height - 1);
    y1 = std::clamp(y1, 0, height - 1);
    int level = 0;
    while (((x1 >> level) - (x0 >> level) > 1 || (y1 >> level) - (y0 >> level) > 1) &&
           level + 1 < static_cast<int>(levels.size()))
        ++level;
    const auto [lw, lh] = level_sizes[level];
    double m = -std::numeric_limits<double>::infinity();
    for (int ty = y0 >> level; ty <= (y1 >> level); ++ty)
        for (int tx = x0 >> level; tx <= (x1 >> level); ++tx)
            m = std::max(m, levels[level][static_cast<std::size_t>(ty) * lw + tx]);
    return m;
}

std::optional<ScreenRect> project_quad(const Camera& camera, const Vec3& center, double radius) {
    const auto proj = project_sphere(camera, center, radius);
    if (!proj) return std::nullopt;
    ScreenRect rect;
    rect.depth_min = proj->depth_min;
    rect.depth_max = proj->depth_max;
    if (proj->whole_screen) {
        rect.x0 = 0;
        rect.y0 = 0;
        rect.x1 = camera.width - 1;
        rect.y1 = camera.height - 1;
        return rect;
    }
    const int x0 = static_cast<int>(std::floor(proj->px_lo));
    const int x1 = static_cast<int>(std::ceil(proj->px_hi));
    const int y0 = static_cast<int>(std::floor(proj->py_lo));
    const int y1 = static_cast<int>(std::ceil(proj->py_hi));
    if (x1 < 0 || x0 > camera.width - 1 || y1 < 0 || y0 > camera.height - 1) return std::nullopt;
    rect.x0 = std::max(x0 - 1, 0);
    rect.x1 = std::min(x1 + 1, camera.width - 1);
    rect.y0 = std::max(y0 - 1, 0);
    rect.y1 = std::min(y1 + 1, camera.height - 1);
    return rect;
}

bool occlusion_test(const PrevFrame& prev, const Vec3& center, double radius) {
    const Camera& cam = prev.camera;
    const auto proj = project_sphere(cam, center, radius);
    if (!proj || proj->whole_screen) return false;
    // One-texel dilation; a rect that leaves the viewport keeps the sphere
    // visible rather than guessing at unseen depth.
    const int x0 = static_cast<int>(std::floor(proj->px_lo)) - 1;
    const int x1 = static_cast<int>(std::ceil(proj->px_hi)) + 1;
    const int y0 = static_cast<int>(std::floor(proj->py_lo)) - 1;
    const int y1 = static_cast<int>(std::ceil(proj->py_hi)) + 1;
    if (x0 < 0 || y0 < 0 || x1 > cam.width - 1 || y1 > cam.height - 1) return false;
    return proj->depth_min > prev.pyramid.max_over(x0, y0, x1, y1) + 2.0 * kHitEps;
}

ChunkCull cull_chunk(const Camera& camera, const Chunk& chunk, double margin,
                     const PrevFrame* prev) {
    const double r = chunk.sphere_radius + margin;
    if (!project_sphere(camera, chunk.sphere_center, r)) return ChunkCull::Frustum;
    if (prev != nullptr && occlusion_test(*prev, chunk.sphere_center, r))
        return ChunkCull::Occluded;
    return ChunkCull::Keep;
}

double render_step_scale(const TemplateTable& table) {
    double worst = 0.0;
    for (const TemplateParams& tp : table.per_class)
        worst = std::max(worst, tp.noise_amplitude * tp.noise_frequency * 3.0);
    return 1.0 / (1.0 + worst);
}

namespace {

// One candidate's bounding-sphere interval along a ray, inflated by the
// trace margin and clamped to the ray's range.
struct SphereSpan {
    double enter = 0.0;
    double exit = 0.0;
    std::uint32_t id = 0;
};

// A sphere whose interval has opened; dropped once the march passes exit.
struct ActiveSphere {
    std::uint32_t id = 0;
    double exit = 0.0;
    Vec3 center;
    double radius = 0.0;
};

}  // namespace

TraceResult trace_pixel(const SceneField& field, std::span<const std::uint32_t> candidates,
                        const Vec3& origin, const Vec3& dir, double t_near, double t_far,
                        double step_scale) {
    TraceResult out;
    const double blend_k = field.max_blend_k;
    const double margin = blend_k + 2.0 * kHitEps;

    thread_local std::vector<SphereSpan> spans;
    spans.clear();

    double t_end = -std::numeric_limits<double>::infinity();
    for (const std::uint32_t id : candidates) {
        const RenderPacket& pk = field.packets[id];
        const Vec3 oc = pk.center - origin;
        const double along = dot(oc, dir);
        const double ri = pk.bounding_radius + margin;
        const double disc = along * along - dot(oc, oc) + ri * ri;
        if (disc <= 0.0) continue;
        const double sq = std::sqrt(disc);
        const double enter = along - sq;
        const double exit = along + sq;
        if (exit < t_near || enter > t_far) continue;
        spans.push_back({std::max(enter, t_near), std::min(exit, t_far), id});
        t_end = std::max(t_end, spans.back().exit);
    }
    if (spans.empty()) return out;
    out.reached_sphere = true;
    std::sort(spans.begin(), spans.end(), [](const SphereSpan& a, const SphereSpan& b) {
        return a.enter != b.enter ? a.enter < b.enter : a.id < b.id;
    });

    // The march keeps the spheres overlapping the current t. Outside every
    // interval each candidate's field exceeds the blend reach, so its join is
    // an exact no-op and the active subset folds to the same surface as the
    // full list; keeping the subset in ascending id order keeps the fold
    // independent of entry order.
    thread_local std::vector<ActiveSphere> active;
    thread_local std::vector<std::uint32_t> active_ids;
    active.clear();

    std::size_t next_span = 0;
    double t = spans.front().enter;
    double last_outside_t = t;
    int steps = 0;
    while (t <= t_end) {
        while (next_span < spans.size() && spans[next_span].enter <= t) {
            const SphereSpan& s = spans[next_span++];
            if (s.exit < t) continue;
            const RenderPacket& pk = field.packets[s.id];
            const auto pos = std::lower_bound(
                active.begin(), active.end(), s.id,
                [](const ActiveSphere& a, std::uint32_t id) { return a.id < id; });
            active.insert(pos, ActiveSphere{s.id, s.exit, pk.center, pk.bounding_radius});
        }
        const Vec3 p = origin + dir * t;
        double sphere_gap = std::numeric_limits<double>::infinity();
        std::size_t live = 0;
        for (std::size_t i = 0; i < active.size(); ++i) {
            if (active[i].exit < t) continue;
            sphere_gap = std::min(sphere_gap, length(p - active[i].center) - active[i].radius);
            active[live++] = active[i];
        }
        active.resize(live);
        const double next_enter =
            next_span < spans.size() ? spans[next_span].enter : std::numeric_limits<double>::infinity();
        if (active.empty()) {
            if (next_span == spans.size()) break;
            last_outside_t = t;
            t = next_enter;
            continue;
        }
        // Far from every open bounding sphere the field cannot reach zero;
        // advance by pure sphere clearance without evaluating packets. Steps
        // never pass the next interval entry, so no sphere is jumped over
        // before it joins the active set.
        if (sphere_gap - blend_k > kBoundSkipSlack) {
            last_outside_t = t;
            t = std::min(t + (sphere_gap - blend_k), next_enter);
            continue;
        }
        if (steps >= kMaxSteps) break;
        ++steps;
        active_ids.resize(active.size());
        for (std::size_t i = 0; i < active.size(); ++i) active_ids[i] = active[i].id;
        const std::span<const std::uint32_t> ids(active_ids);
        const double d = scene_sdf(field, ids, p).distance;
        if (d <= 0.0) {
            double lo = last_outside_t;
            double hi = t;
            for (int i = 0; i < kBisectIters; ++i) {
                const double mid = 0.5 * (lo + hi);
                if (scene_sdf(field, ids, origin + dir * mid).distance > 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            const Vec3 hit_point = origin + dir * hi;
            out.hit = true;
            out.t = hi;
            out.sample = scene_sdf(field, ids, hit_point);
            out.normal = sdf_gradient(
                [&](const Vec3& q) { return scene_sdf(field, ids, q).distance; }, hit_point);
            out.steps = steps;
            return out;
        }
        last_outside_t = t;
        double step = std::max(step_scale * d, kStepFloor);
        if (sphere_gap - blend_k > step) step = sphere_gap - blend_k;
        t = std::min(t + step, next_enter);
    }
    out.steps = steps;
    return out;
}

Rgb shade(const SdfSample& sample, const Vec3& normal, const Vec3& view_dir,
          const Vec3& light_dir, const Material& material) {
    const double ndl = std::max(0.0, dot(normal, light_dir));
    double spec = 0.0;
    const Vec3 half_sum = light_dir + view_dir;
    if (length(half_sum) > 1e-12) {
        const double ndh = std::max(0.0, dot(normal, normalized(half_sum)));
        const double r = material.roughness;
        const double shininess = std::max(0.0, 2.0 / (r * r * r * r + 1e-4) - 2.0);
        spec = material.specular * std::pow(ndh, shininess);
    }
    Rgb out;
    for (int c = 0; c < 3; ++c) {
        const double v = static_cast<double>(sample.albedo[c]) * material.diffuse[c] * ndl + spec;
        out[c] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
    return out;
}

std::string CullStats::to_line() const {
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "total=%llu chunk_culled=%llu frustum_culled=%llu occlusion_culled=%llu "
                  "traced=%llu rays=%llu avg_steps=%.3f",
                  static_cast<unsigned long long>(total_packets),
                  static_cast<unsigned long long>(chunk_culled),
                  static_cast<unsigned long long>(frustum_culled),
                  static_cast<unsigned long long>(occlusion_culled),
                  static_cast<unsigned long long>(traced),
                  static_cast<unsigned long long>(rays_marched), average_steps);
    return buf;
}

RenderOutput render_frame(const SceneField& field, std::span<const Chunk> chunks,
                          const MaterialTable& materials, const Camera& camera,
                          const RenderSettings& settings, const PrevFrame* prev) {
    validate_camera(camera);
    if (prev != nullptr &&
        (prev->pyramid.width != prev->camera.width || prev->pyramid.height != prev->camera.height))
        throw std::invalid_argument("render_frame: previous depth does not match its camera");

    RenderOutput out;
    FrameBuffers& fb = out.frame;
    fb.width = camera.width;
    fb.height = camera.height;
    const std::size_t pixel_count =
        static_cast<std::size_t>(camera.width) * static_cast<std::size_t>(camera.height);
    fb.color.assign(pixel_count, Rgb{0.0f, 0.0f, 0.0f});
    fb.depth.assign(pixel_count, camera.far_plane);

    CullStats& stats = out.stats;
    const std::size_t n = field.packets.size();
    stats.total_packets = n;
    const double margin = field.max_blend_k + 2.0 * kHitEps;
    const double step_scale = render_step_scale(*field.table);
    const PrevFrame* occl = settings.cull_occlusion ? prev : nullptr;

    // Phase 1: whole chunks.
    std::vector<std::uint8_t> alive(n, 1);
    for (const Chunk& chunk : chunks) {
        ChunkCull verdict = ChunkCull::Keep;
        const double r = chunk.sphere_radius + margin;
        if (settings.cull_chunks && !project_sphere(camera, chunk.sphere_center, r))
            verdict = ChunkCull::Frustum;
        else if (occl != nullptr && occlusion_test(*occl, chunk.sphere_center, r))
            verdict = ChunkCull::Occluded;
        if (verdict == ChunkCull::Keep) continue;
        for (const std::uint32_t idx : chunk.packet_indices) {
            if (!alive[idx]) continue;
            alive[idx] = 0;
            if (verdict == ChunkCull::Frustum)
                ++stats.chunk_culled;
            else
                ++stats.occlusion_culled;
        }
    }

    // Phase 2: per-packet culling and tile binning, ascending packet order so
    // every tile's candidate list is sorted.
    const int tiles_x = (camera.width + kTileSize - 1) / kTileSize;
    const int tiles_y = (camera.height + kTileSize - 1) / kTileSize;
    std::vector<std::vector<std::uint32_t>> bins(static_cast<std::size_t>(tiles_x) * tiles_y);
    for (std::uint32_t i = 0; i < n; ++i) {
        if (!alive[i]) continue;
        const RenderPacket& pk = field.packets[i];
        const double r = pk.bounding_radius + margin;
        auto rect = project_quad(camera, pk.center, r);
        if (!rect) {
            if (settings.cull_frustum) {
                ++stats.frustum_culled;
                continue;
            }
            // Reference mode keeps the packet; per-ray sphere tests will
            // reject it, preserving exact equality with culled renders.
            rect = ScreenRect{0, 0, camera.width - 1, camera.height - 1, camera.near_plane,
                              camera.far_plane};
        }
        if (occl != nullptr && occlusion_test(*occl, pk.center, r)) {
            ++stats.occlusion_culled;
            continue;
        }
        ++stats.traced;
        for (int ty = rect->y0 / kTileSize; ty <= rect->y1 / kTileSize; ++ty)
            for (int tx = rect->x0 / kTileSize; tx <= rect->x1 / kTileSize; ++tx)
                bins[static_cast<std::size_t>(ty) * tiles_x + tx].push_back(i);
    }

    // Phase 3: trace tiles in parallel; stats are folded in tile order after
    // the join so totals are schedule-independent.
    const CameraFrame frame = camera_frame(camera);
    const Vec3 light = normalized(settings.light_dir);
    struct TileStats {
        std::uint64_t rays = 0;
        std::uint64_t steps = 0;
    };
    std::vector<TileStats> tile_stats(bins.size());

    parallel_for(bins.size(), resolve_threads(settings.threads), [&](std::size_t tile) {
        const int tx = static_cast<int>(tile % static_cast<std::size_t>(tiles_x));
        const int ty = static_cast<int>(tile / static_cast<std::size_t>(tiles_x));
        const int px_end = std::min((tx + 1) * kTileSize, camera.width);
        const int py_end = std::min((ty + 1) * kTileSize, camera.height);
        for (int py = ty * kTileSize; py < py_end; ++py) {
            for (int px = tx * kTileSize; px < px_end; ++px) {
                const double sx = ((px + 0.5) / camera.width * 2.0 - 1.0) * frame.tan_x;
                const double sy = (1.0 - (py + 0.5) / camera.height * 2.0) * frame.tan_y;
                const double inv_norm = 1.0 / std::sqrt(sx * sx + sy * sy + 1.0);
                const Vec3 dir =
                    (camera.right * sx + camera.up * sy + camera.forward) * inv_norm;
                const double cos_f = inv_norm;
                const std::size_t at = static_cast<std::size_t>(py) * camera.width + px;

                const TraceResult tr =
                    trace_pixel(field, bins[tile], camera.position, dir,
                                camera.near_plane / cos_f, camera.far_plane / cos_f, step_scale);
                if (tr.reached_sphere) {
                    ++tile_stats[tile].rays;
                    tile_stats[tile].steps += static_cast<std::uint64_t>(tr.steps);
                }
                if (tr.hit) {
                    const std::size_t mat_idx =
                        std::min<std::size_t>(tr.sample.material_id, materials.size() - 1);
                    fb.color[at] = shade(tr.sample, tr.normal, dir * -1.0, light,
                                         materials[mat_idx]);
                    fb.depth[at] =
                        std::clamp(tr.t * cos_f, camera.near_plane, camera.far_plane);
                } else {
                    fb.color[at] = background_color(settings, dir);
                }
            }
        }
    });

    std::uint64_t steps_total = 0;
    for (const TileStats& ts : tile_stats) {
        stats.rays_marched += ts.rays;
        steps_total += ts.steps;
    }
    stats.average_steps =
        stats.rays_marched > 0 ? static_cast<double>(steps_total) / stats.rays_marched : 0.0;
    return out;
}

void write_ppm(std::ostream& out, const FrameBuffers& frame) {
    char header[64];
    const int len =
        std::snprintf(header, sizeof header, "P6\n%d %d\n255\n", frame.width, frame.height);
    out.write(header, len);
    std::string bytes;
    bytes.reserve(frame.color.size() * 3);
    for (const Rgb& c : frame.color)
        for (int i = 0; i < 3; ++i) {
            // Quantize via unsigned char: double -> char would be undefined
            // for values above CHAR_MAX.
            const auto q = static_cast<unsigned char>(
                std::floor(std::clamp(static_cast<double>(c[i]), 0.0, 1.0) * 255.0 + 0.5));
            bytes.push_back(static_cast<char>(q));
        }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace pointamp
