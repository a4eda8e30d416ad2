#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pointamp/config.hpp"
#include "pointamp/error.hpp"
#include "pointamp/ingest.hpp"
#include "pointamp/packets.hpp"
#include "pointamp/render.hpp"
#include "pointamp/sdf.hpp"
#include "pointamp/spatial.hpp"
#include "pointamp/synthetic.hpp"
#include "pointamp/templates.hpp"

namespace {

using namespace pointamp;

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::vector<RawPoint> load_cloud(const std::string& path, std::string format) {
    if (format == "auto") format = ends_with(path, ".pamp") ? "pamp" : "xyzc";
    std::ifstream in(path, format == "pamp" ? std::ios::binary : std::ios::in);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    try {
        return format == "pamp" ? parse_pamp(in) : parse_xyzc(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void save_cloud(const std::string& path, std::span<const RawPoint> points) {
    const bool pamp = ends_with(path, ".pamp");
    std::ofstream out(path, pamp ? std::ios::binary : std::ios::out);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    if (pamp)
        write_pamp(out, points);
    else
        write_xyzc(out, points);
    if (!out) throw std::runtime_error("write failed: '" + path + "'");
}

PacketScene load_scene(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    try {
        return read_packets(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void load_template_file(const std::string& path, TemplateTable& templates,
                        MaterialTable& materials) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open template config '" + path + "'");
    try {
        apply_template_config(templates, f);
        f.clear();
        f.seekg(0);
        apply_material_config(materials, f);
    } catch (const std::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void print_class_histogram(std::span<const std::size_t> counts) {
    for (int c = 0; c < kClassCount; ++c)
        if (counts[c] > 0)
            std::cout << "class " << class_name(static_cast<CanonicalClass>(c)) << ": "
                      << counts[c] << '\n';
}

// ---- ingest ------------------------------------------------------------

struct IngestOpts {
    std::string input;
    std::string output;
    std::string format = "auto";
    std::string scheme = "dales";
};

void run_ingest(const IngestOpts& o) {
    const std::vector<RawPoint> points = load_cloud(o.input, o.format);
    save_cloud(o.output, points);
    std::cout << "points: " << points.size() << '\n';
    std::vector<std::size_t> counts(kClassCount, 0);
    for (const RawPoint& p : points)
        ++counts[static_cast<int>(map_class(p.class_code, o.scheme))];
    print_class_histogram(counts);
}

// ---- build -------------------------------------------------------------

struct BuildOpts {
    std::string cloud;
    std::string output;
    std::string ortho;
    double cell_size = 0.0;  // <= 0: estimate from spacing
    int chunk_factor = 8;
    std::uint64_t seed = 0;
    double radius_max = 3.0;
    std::string scheme = "dales";
    std::string ground_as = "ground";
    bool low_veg_as_grass = false;
    double low_veg_height = 0.5;
    int threads = 1;
    std::string templates_path;
};

void run_build(const BuildOpts& o) {
    std::vector<RawPoint> points = load_cloud(o.cloud, "auto");

    OrthoImage ortho;
    bool has_ortho = false;
    if (!o.ortho.empty()) {
        ortho = load_ortho(o.ortho);
        has_ortho = true;
    }

    TemplateTable templates = default_template_table();
    MaterialTable materials = default_materials();
    if (!o.templates_path.empty()) load_template_file(o.templates_path, templates, materials);

    const double cell =
        o.cell_size > 0.0 ? o.cell_size : estimate_cell_size(points, o.scheme);
    const GridIndex index = build_grid(std::move(points), cell, o.chunk_factor);

    BuildParams params;
    params.global_seed = o.seed;
    params.radius_max = o.radius_max;
    params.scheme = o.scheme;
    params.ground_as = *class_from_name(o.ground_as);
    params.low_veg_grass_height = o.low_veg_as_grass ? o.low_veg_height : -1.0;
    params.threads = o.threads;

    PacketScene scene;
    scene.packets = build_packets(index, has_ortho ? &ortho : nullptr, templates, params);
    std::vector<Vec3> centers;
    std::vector<float> radii;
    centers.reserve(scene.packets.size());
    radii.reserve(scene.packets.size());
    for (const RenderPacket& pk : scene.packets) {
        centers.push_back(pk.center);
        radii.push_back(pk.bounding_radius);
    }
    scene.chunks = build_chunks(index, centers, radii);
    scene.global_seed = o.seed;
    scene.cell_size = cell;
    scene.chunk_factor = static_cast<std::uint32_t>(o.chunk_factor);

    std::ofstream out(o.output, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + o.output + "' for writing");
    write_packets(out, scene);
    if (!out) throw std::runtime_error("write failed: '" + o.output + "'");

    double degree_sum = 0.0;
    for (const RenderPacket& pk : scene.packets) degree_sum += pk.adjacency_count;
    char line[128];
    std::snprintf(line, sizeof line, "cell_size: %.6g\npackets: %zu\nmean_degree: %.3f\n", cell,
                  scene.packets.size(),
                  scene.packets.empty() ? 0.0 : degree_sum / scene.packets.size());
    std::cout << line;
}

// ---- shared render configuration ----------------------------------------

struct ViewOpts {
    std::string config_path;
    bool dump_config = false;
    bool no_cull = false;
    RenderConfig flag_values;
    std::vector<double> cam_pos{0.0, -10.0, 5.0};
    std::vector<double> cam_target{0.0, 0.0, 0.0};
    std::vector<double> light{0.35, 0.25, 0.90};
    std::vector<double> zenith{0.45, 0.62, 0.85};
    std::vector<double> horizon{0.82, 0.88, 0.95};

    CLI::Option* o_width = nullptr;
    CLI::Option* o_height = nullptr;
    CLI::Option* o_fov = nullptr;
    CLI::Option* o_near = nullptr;
    CLI::Option* o_far = nullptr;
    CLI::Option* o_cam_pos = nullptr;
    CLI::Option* o_cam_target = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_light = nullptr;
    CLI::Option* o_zenith = nullptr;
    CLI::Option* o_horizon = nullptr;
    CLI::Option* o_frustum = nullptr;
    CLI::Option* o_chunks = nullptr;
    CLI::Option* o_occlusion = nullptr;
    CLI::Option* o_threads = nullptr;
    CLI::Option* o_scheme = nullptr;
    CLI::Option* o_templates = nullptr;

    void attach(CLI::App* sub, bool with_pose) {
        sub->add_option("--config", config_path,
                        "key=value config file; explicit flags override it");
        sub->add_flag("--dump-config", dump_config,
                      "print the effective config to stdout and exit");
        o_width = sub->add_option("--width", flag_values.width, "image width (px)")
                      ->check(CLI::PositiveNumber);
        o_height = sub->add_option("--height", flag_values.height, "image height (px)")
                       ->check(CLI::PositiveNumber);
        o_fov = sub->add_option("--fov", flag_values.vertical_fov, "vertical field of view (rad)");
        o_near = sub->add_option("--near", flag_values.near_plane, "near plane (m)");
        o_far = sub->add_option("--far", flag_values.far_plane, "far plane (m)");
        if (with_pose) {
            o_cam_pos = sub->add_option("--cam-pos", cam_pos, "camera position x y z")
                            ->expected(3);
            o_cam_target = sub->add_option("--cam-target", cam_target, "look-at point x y z")
                               ->expected(3);
        }
        o_seed = sub->add_option("--seed", flag_values.global_seed, "global seed");
        o_light = sub->add_option("--light", light, "direction toward the light x y z")
                      ->expected(3);
        o_zenith = sub->add_option("--background-zenith", zenith, "sky color at zenith r g b")
                       ->expected(3);
        o_horizon = sub->add_option("--background-horizon", horizon, "sky color at horizon r g b")
                        ->expected(3);
        o_frustum = sub->add_flag("--frustum-cull,!--no-frustum-cull", flag_values.cull_frustum,
                                  "per-packet frustum culling (default on)");
        o_chunks = sub->add_flag("--chunk-cull,!--no-chunk-cull", flag_values.cull_chunks,
                                 "whole-chunk culling (default on)");
        o_occlusion = sub->add_flag("--occlusion-cull,!--no-occlusion-cull",
                                    flag_values.cull_occlusion,
                                    "previous-frame occlusion culling (default on)");
        sub->add_flag("--no-cull", no_cull, "disable every culling stage (reference mode)");
        o_threads = sub->add_option("--threads", flag_values.threads,
                                    "worker threads, 0 = auto (POINTAMP_THREADS overrides)")
                        ->check(CLI::NonNegativeNumber);
        o_scheme = sub->add_option("--scheme", flag_values.scheme, "class-map scheme");
        o_templates =
            sub->add_option("--templates", flag_values.template_config, "template config path");
    }

    RenderConfig resolve() const {
        RenderConfig cfg;
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw std::runtime_error("cannot open config '" + config_path + "'");
            try {
                cfg = parse_render_config(f);
            } catch (const std::exception& e) {
                throw std::runtime_error(config_path + ": " + e.what());
            }
        }
        if (o_width->count()) cfg.width = flag_values.width;
        if (o_height->count()) cfg.height = flag_values.height;
        if (o_fov->count()) cfg.vertical_fov = flag_values.vertical_fov;
        if (o_near->count()) cfg.near_plane = flag_values.near_plane;
        if (o_far->count()) cfg.far_plane = flag_values.far_plane;
        if (o_cam_pos != nullptr && o_cam_pos->count())
            cfg.cam_pos = {cam_pos[0], cam_pos[1], cam_pos[2]};
        if (o_cam_target != nullptr && o_cam_target->count())
            cfg.cam_target = {cam_target[0], cam_target[1], cam_target[2]};
        if (o_seed->count()) cfg.global_seed = flag_values.global_seed;
        if (o_light->count()) cfg.light_dir = {light[0], light[1], light[2]};
        if (o_zenith->count())
            cfg.background_zenith = {static_cast<float>(zenith[0]), static_cast<float>(zenith[1]),
                                     static_cast<float>(zenith[2])};
        if (o_horizon->count())
            cfg.background_horizon = {static_cast<float>(horizon[0]),
                                      static_cast<float>(horizon[1]),
                                      static_cast<float>(horizon[2])};
        if (o_frustum->count()) cfg.cull_frustum = flag_values.cull_frustum;
        if (o_chunks->count()) cfg.cull_chunks = flag_values.cull_chunks;
        if (o_occlusion->count()) cfg.cull_occlusion = flag_values.cull_occlusion;
        if (o_threads->count()) cfg.threads = flag_values.threads;
        if (o_scheme->count()) cfg.scheme = flag_values.scheme;
        if (o_templates->count()) cfg.template_config = flag_values.template_config;
        if (no_cull) {
            cfg.cull_frustum = false;
            cfg.cull_chunks = false;
            cfg.cull_occlusion = false;
        }
        return cfg;
    }
};

RenderSettings settings_from_config(const RenderConfig& cfg) {
    RenderSettings s;
    s.background_zenith = cfg.background_zenith;
    s.background_horizon = cfg.background_horizon;
    s.light_dir = cfg.light_dir;
    s.cull_chunks = cfg.cull_chunks;
    s.cull_frustum = cfg.cull_frustum;
    s.cull_occlusion = cfg.cull_occlusion;
    s.threads = cfg.threads;
    return s;
}

struct SceneBundle {
    PacketScene scene;
    TemplateTable templates;
    MaterialTable materials;
    SceneField field;
};

// Heap-allocated because field holds pointers into the other members; the
// bundle's address must stay fixed once built.
std::unique_ptr<SceneBundle> load_bundle(const std::string& pkt_path, const RenderConfig& cfg) {
    auto b = std::make_unique<SceneBundle>();
    b->scene = load_scene(pkt_path);
    b->templates = default_template_table();
    b->materials = default_materials();
    if (!cfg.template_config.empty())
        load_template_file(cfg.template_config, b->templates, b->materials);
    b->field = make_scene_field(b->scene.packets, b->scene.chunks, b->templates);
    return b;
}

void save_frame(const std::string& path, const FrameBuffers& frame) {
    std::ofstream img(path, std::ios::binary);
    if (!img) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_ppm(img, frame);
    if (!img) throw std::runtime_error("write failed: '" + path + "'");
}

// ---- render --------------------------------------------------------------

struct RenderOpts {
    std::string packets;
    std::string output = "out.ppm";
    int passes = 1;
    bool stats = false;
    ViewOpts view;
};

void run_render(const RenderOpts& o) {
    const RenderConfig cfg = o.view.resolve();
    if (o.view.dump_config) {
        dump_render_config(std::cout, cfg);
        return;
    }
    if (o.packets.empty()) throw std::runtime_error("missing packet file argument");

    const Camera camera = look_at(cfg.cam_pos, cfg.cam_target, cfg.vertical_fov, cfg.near_plane,
                                  cfg.far_plane, cfg.width, cfg.height);
    const auto bundle = load_bundle(o.packets, cfg);
    const RenderSettings settings = settings_from_config(cfg);

    RenderOutput out;
    PrevFrame prev;
    bool has_prev = false;
    for (int pass = 0; pass < o.passes; ++pass) {
        out = render_frame(bundle->field, bundle->scene.chunks, bundle->materials, camera, settings,
                           has_prev ? &prev : nullptr);
        if (pass + 1 < o.passes) {
            prev.pyramid = DepthPyramid::build(out.frame.depth, out.frame.width, out.frame.height);
            prev.camera = camera;
            has_prev = true;
        }
    }
    save_frame(o.output, out.frame);
    if (o.stats) std::cout << out.stats.to_line() << '\n';
}

// ---- flythrough ------------------------------------------------------------

struct FlythroughOpts {
    std::string packets;
    std::string path_file;
    std::string out_dir = "frames";
    std::string pattern = "frame_%04d.ppm";
    bool stats = false;
    ViewOpts view;
};

// Exactly one % conversion, and it must be a plain (optionally
// zero-padded) integer; everything else would corrupt the snprintf below.
void check_frame_pattern(const std::string& pattern) {
    std::size_t conversions = 0;
    for (std::size_t i = 0; i < pattern.size(); ++i) {
        if (pattern[i] != '%') continue;
        std::size_t j = i + 1;
        while (j < pattern.size() && std::isdigit(static_cast<unsigned char>(pattern[j]))) ++j;
        if (j >= pattern.size() || pattern[j] != 'd')
            throw std::runtime_error("frame pattern: only a single %d / %0Nd is supported");
        ++conversions;
        i = j;
    }
    if (conversions != 1)
        throw std::runtime_error("frame pattern must contain exactly one %d placeholder");
}

void run_flythrough(const FlythroughOpts& o) {
    const RenderConfig cfg = o.view.resolve();
    if (o.view.dump_config) {
        dump_render_config(std::cout, cfg);
        return;
    }
    if (o.packets.empty()) throw std::runtime_error("missing packet file argument");
    check_frame_pattern(o.pattern);

    CameraPath path;
    {
        std::ifstream f(o.path_file);
        if (!f) throw std::runtime_error("cannot open camera path '" + o.path_file + "'");
        try {
            path = parse_camera_path(f);
        } catch (const std::exception& e) {
            throw std::runtime_error(o.path_file + ": " + e.what());
        }
    }

    const auto bundle = load_bundle(o.packets, cfg);
    const RenderSettings settings = settings_from_config(cfg);
    std::filesystem::create_directories(o.out_dir);

    const std::vector<double> times = camera_path_frame_times(path);
    PrevFrame prev;
    bool has_prev = false;
    for (std::size_t i = 0; i < times.size(); ++i) {
        const CameraPose pose = sample_camera_path(path, times[i]);
        const Camera camera = look_at(pose.position, pose.look_at, cfg.vertical_fov,
                                      cfg.near_plane, cfg.far_plane, cfg.width, cfg.height);
        const RenderOutput out = render_frame(bundle->field, bundle->scene.chunks, bundle->materials,
                                              camera, settings, has_prev ? &prev : nullptr);
        char name[512];
        std::snprintf(name, sizeof name, o.pattern.c_str(), static_cast<int>(i + 1));
        save_frame((std::filesystem::path(o.out_dir) / name).string(), out.frame);
        if (o.stats) std::cout << "frame " << (i + 1) << ": " << out.stats.to_line() << '\n';
        prev.pyramid = DepthPyramid::build(out.frame.depth, out.frame.width, out.frame.height);
        prev.camera = camera;
        has_prev = true;
    }
}

// ---- stats -----------------------------------------------------------------

void run_stats(const std::string& pkt_path) {
    const PacketScene scene = load_scene(pkt_path);
    std::cout << "packets: " << scene.packets.size() << '\n';
    std::cout << "chunks: " << scene.chunks.size() << '\n';

    std::vector<std::size_t> class_counts(kClassCount, 0);
    std::vector<std::size_t> degree_counts(9, 0);
    std::vector<float> radii;
    radii.reserve(scene.packets.size());
    for (const RenderPacket& pk : scene.packets) {
        ++class_counts[static_cast<int>(pk.cls)];
        ++degree_counts[pk.adjacency_count];
        radii.push_back(pk.bounding_radius);
    }
    print_class_histogram(class_counts);
    for (int d = 0; d <= 8; ++d) std::cout << "degree " << d << ": " << degree_counts[d] << '\n';

    if (!radii.empty()) {
        std::sort(radii.begin(), radii.end());
        const auto pct = [&](double p) {
            const double pos = p / 100.0 * static_cast<double>(radii.size() - 1);
            return radii[static_cast<std::size_t>(std::lround(pos))];
        };
        char line[160];
        std::snprintf(line, sizeof line,
                      "radius p0=%.3f p50=%.3f p90=%.3f p99=%.3f p100=%.3f\n", pct(0.0),
                      pct(50.0), pct(90.0), pct(99.0), pct(100.0));
        std::cout << line;
    }
}

// ---- gen-synthetic ----------------------------------------------------------

struct GenOpts {
    std::string kind;
    std::string output;
    std::uint64_t seed = 1;
    std::size_t count = 5;
    double spacing = 1.0;
    double extent = 100.0;
    double half_width = 10.0;
    double height = 10.0;
    std::string cls = "vegetation";
    std::vector<double> box_min{0.0, 0.0, 0.0};
    std::vector<double> box_max{10.0, 10.0, 5.0};
};

void run_gen(const GenOpts& o) {
    const auto cls = class_from_name(o.cls);
    if (!cls) throw std::runtime_error("unknown class '" + o.cls + "'");
    std::vector<RawPoint> points;
    if (o.kind == "cluster")
        points = synthetic_cluster(static_cast<int>(o.count), o.spacing, *cls);
    else if (o.kind == "wall")
        points = synthetic_wall(o.half_width, o.height, o.spacing, *cls);
    else if (o.kind == "wall-scene")
        points = synthetic_wall_scene(o.seed);
    else if (o.kind == "scatter")
        points = synthetic_scatter(o.count, Vec3{o.box_min[0], o.box_min[1], o.box_min[2]},
                                   Vec3{o.box_max[0], o.box_max[1], o.box_max[2]}, *cls, o.seed);
    else if (o.kind == "tile")
        points = synthetic_tile(o.count, o.extent, o.seed);
    else
        throw std::runtime_error("unknown synthetic kind '" + o.kind + "'");
    save_cloud(o.output, points);
    std::cout << "points: " << points.size() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pointamp: amplifies sparse classified LiDAR into procedural SDF packets "
                 "and renders them"};
    app.require_subcommand(1);

    IngestOpts ingest;
    CLI::App* ingest_cmd = app.add_subcommand("ingest", "parse a point cloud and write .pamp");
    ingest_cmd->add_option("input", ingest.input, "input cloud (.xyzc or .pamp)")->required();
    ingest_cmd->add_option("output", ingest.output, "output .pamp path")->required();
    ingest_cmd->add_option("--format", ingest.format, "input format")
        ->check(CLI::IsMember({"auto", "xyzc", "pamp"}))
        ->capture_default_str();
    ingest_cmd->add_option("--scheme", ingest.scheme, "class-map scheme for the histogram")
        ->capture_default_str();
    ingest_cmd->callback([&] { run_ingest(ingest); });

    BuildOpts build;
    CLI::App* build_cmd =
        app.add_subcommand("build", "amplify a cloud into render packets (.pkt)");
    build_cmd->add_option("cloud", build.cloud, "input cloud (.xyzc or .pamp)")->required();
    build_cmd->add_option("output", build.output, "output .pkt path")->required();
    build_cmd->add_option("--ortho", build.ortho, "orthophoto (.ppm with .wld sidecar)");
    build_cmd->add_option("--cell-size", build.cell_size,
                          "grid cell size in meters; 0 estimates from point spacing")
        ->capture_default_str();
    build_cmd->add_option("--chunk-factor", build.chunk_factor, "cells per chunk edge")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    build_cmd->add_option("--seed", build.seed, "global seed")->capture_default_str();
    build_cmd->add_option("--radius-max", build.radius_max, "adjacency search radius (m)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    build_cmd->add_option("--scheme", build.scheme, "class-map scheme")->capture_default_str();
    build_cmd->add_option("--ground-as", build.ground_as,
                          "template used for ground returns")
        ->check(CLI::IsMember({"ground", "grass", "road"}))
        ->capture_default_str();
    build_cmd->add_flag("--low-veg-as-grass", build.low_veg_as_grass,
                        "reclassify low vegetation as grass");
    build_cmd->add_option("--low-veg-height", build.low_veg_height,
                          "height above column floor counting as low (m)")
        ->capture_default_str();
    build_cmd->add_option("--threads", build.threads, "worker threads, 0 = auto")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    build_cmd->add_option("--templates", build.templates_path, "template config path");
    build_cmd->callback([&] { run_build(build); });

    RenderOpts render;
    CLI::App* render_cmd = app.add_subcommand("render", "render one frame from a .pkt scene");
    render_cmd->add_option("packets", render.packets, "input .pkt scene");
    render_cmd->add_option("-o,--out", render.output, "output image (.ppm)")
        ->capture_default_str();
    render_cmd->add_option("--passes", render.passes,
                           "render the frame N times, feeding depth reprojection")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    render_cmd->add_flag("--stats", render.stats, "print the culling statistics line");
    render.view.attach(render_cmd, /*with_pose=*/true);
    render_cmd->callback([&] { run_render(render); });

    FlythroughOpts fly;
    CLI::App* fly_cmd =
        app.add_subcommand("flythrough", "render a camera-path frame sequence");
    fly_cmd->add_option("packets", fly.packets, "input .pkt scene");
    fly_cmd->add_option("--path", fly.path_file, "camera path JSON")->required();
    fly_cmd->add_option("--out-dir", fly.out_dir, "output directory")->capture_default_str();
    fly_cmd->add_option("--pattern", fly.pattern, "frame filename pattern")
        ->capture_default_str();
    fly_cmd->add_flag("--stats", fly.stats, "print one statistics line per frame");
    fly.view.attach(fly_cmd, /*with_pose=*/false);
    fly_cmd->callback([&] { run_flythrough(fly); });

    std::string stats_path;
    CLI::App* stats_cmd = app.add_subcommand("stats", "summarize a .pkt scene");
    stats_cmd->add_option("packets", stats_path, "input .pkt scene")->required();
    stats_cmd->callback([&] { run_stats(stats_path); });

    GenOpts gen;
    CLI::App* gen_cmd = app.add_subcommand("gen-synthetic", "emit seeded synthetic test clouds");
    gen_cmd->group("");  // hidden
    gen_cmd->add_option("--kind", gen.kind, "cluster | wall | wall-scene | scatter | tile")
        ->required()
        ->check(CLI::IsMember({"cluster", "wall", "wall-scene", "scatter", "tile"}));
    gen_cmd->add_option("-o,--out", gen.output, "output cloud (.xyzc or .pamp)")->required();
    gen_cmd->add_option("--seed", gen.seed, "stream seed")->capture_default_str();
    gen_cmd->add_option("--count", gen.count, "point count")->capture_default_str();
    gen_cmd->add_option("--spacing", gen.spacing, "lattice spacing (m)")->capture_default_str();
    gen_cmd->add_option("--extent", gen.extent, "tile edge length (m)")->capture_default_str();
    gen_cmd->add_option("--half-width", gen.half_width, "wall half width (m)")
        ->capture_default_str();
    gen_cmd->add_option("--height", gen.height, "wall height (m)")->capture_default_str();
    gen_cmd->add_option("--cls", gen.cls, "canonical class name")->capture_default_str();
    gen_cmd->add_option("--box-min", gen.box_min, "scatter box corner x y z")->expected(3);
    gen_cmd->add_option("--box-max", gen.box_max, "scatter box corner x y z")->expected(3);
    gen_cmd->callback([&] { run_gen(gen); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
