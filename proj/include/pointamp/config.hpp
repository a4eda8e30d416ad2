#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pointamp/math.hpp"

namespace pointamp {

// Flat key=value render configuration. One struct backs the CLI flags and
// the --config / --dump-config round trip, so a dumped file reproduces a
// run bit-exactly.
struct RenderConfig {
    int width = 640;
    int height = 360;
    double vertical_fov = 0.9;  // rad
    double near_plane = 0.1;    // m
    double far_plane = 300.0;   // m
    Vec3 cam_pos{0.0, -10.0, 5.0};
    Vec3 cam_target{0.0, 0.0, 0.0};
    std::uint64_t global_seed = 0;
    Vec3 light_dir{0.35, 0.25, 0.90};
    Rgb background_zenith{0.45f, 0.62f, 0.85f};
    Rgb background_horizon{0.82f, 0.88f, 0.95f};
    bool cull_frustum = true;
    bool cull_chunks = true;
    bool cull_occlusion = true;
    int threads = 1;  // 0 = auto
    std::string scheme = "dales";
    std::string template_config;  // path; empty keeps built-in defaults

    bool operator==(const RenderConfig&) const = default;
};

// One `key = value` per line, '#' comments. Unknown keys and malformed
// values throw ParseError carrying the line number. Reals are written with
// enough digits that parse(dump(c)) == c exactly.
RenderConfig parse_render_config(std::istream& in);
void dump_render_config(std::ostream& out, const RenderConfig& config);

struct CameraKeyframe {
    double time = 0.0;  // seconds
    Vec3 position;
    Vec3 look_at;
};

struct CameraPath {
    std::vector<CameraKeyframe> keyframes;  // strictly increasing times
    double frame_rate = 10.0;               // Hz
};

// JSON document of the form
//   {"frame_rate": 10, "keyframes": [{"time": t, "position": [x,y,z],
//    "look_at": [x,y,z]}, ...]}
// Throws FormatError on malformed JSON, an empty keyframe list, non-finite
// values, or times out of order.
CameraPath parse_camera_path(std::istream& in);

struct CameraPose {
    Vec3 position;
    Vec3 look_at;
};

// Piecewise linear in time; clamps before the first and past the last key.
CameraPose sample_camera_path(const CameraPath& path, double time);

// Frame timestamps from the first to the last keyframe at 1/frame_rate
// spacing; a single keyframe yields exactly one frame.
std::vector<double> camera_path_frame_times(const CameraPath& path);

}  // namespace pointamp
