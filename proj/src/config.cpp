#include "pointamp/config.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "kv_config.hpp"
#include "pointamp/error.hpp"

namespace pointamp {

using detail::ConfigLine;
using detail::next_pair;
using detail::parse_real;

namespace {

std::string real_text(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string real_text(float v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", static_cast<double>(v));
    return buf;
}

bool parse_bool(const ConfigLine& kv) {
    if (kv.value == "true" || kv.value == "1") return true;
    if (kv.value == "false" || kv.value == "0") return false;
    throw ParseError(kv.line, "expected true/false, got '" + kv.value + "'");
}

std::uint64_t parse_u64(const ConfigLine& kv) {
    try {
        if (!kv.value.empty() && kv.value[0] == '-') throw std::invalid_argument("negative");
        std::size_t used = 0;
        const unsigned long long v = std::stoull(kv.value, &used);
        if (used != kv.value.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        throw ParseError(kv.line, "bad unsigned value '" + kv.value + "'");
    }
}

int parse_int(const ConfigLine& kv) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(kv.value, &used);
        if (used != kv.value.size()) throw std::invalid_argument("trailing junk");
        if (v < INT_MIN || v > INT_MAX) throw std::out_of_range("int range");
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw ParseError(kv.line, "bad integer value '" + kv.value + "'");
    }
}

}  // namespace

RenderConfig parse_render_config(std::istream& in) {
    RenderConfig c;
    int line_no = 0;
    for (ConfigLine kv = next_pair(in, line_no); kv.present; kv = next_pair(in, line_no)) {
        if (kv.key == "width")
            c.width = parse_int(kv);
        else if (kv.key == "height")
            c.height = parse_int(kv);
        else if (kv.key == "vertical_fov")
            c.vertical_fov = parse_real(kv);
        else if (kv.key == "near_plane")
            c.near_plane = parse_real(kv);
        else if (kv.key == "far_plane")
            c.far_plane = parse_real(kv);
        else if (kv.key == "cam_pos_x")
            c.cam_pos.x = parse_real(kv);
        else if (kv.key == "cam_pos_y")
            c.cam_pos.y = parse_real(kv);
        else if (kv.key == "cam_pos_z")
            c.cam_pos.z = parse_real(kv);
        else if (kv.key == "cam_target_x")
            c.cam_target.x = parse_real(kv);
        else if (kv.key == "cam_target_y")
            c.cam_target.y = parse_real(kv);
        else if (kv.key == "cam_target_z")
            c.cam_target.z = parse_real(kv);
        else if (kv.key == "global_seed")
            c.global_seed = parse_u64(kv);
        else if (kv.key == "light_x")
            c.light_dir.x = parse_real(kv);
        else if (kv.key == "light_y")
            c.light_dir.y = parse_real(kv);
        else if (kv.key == "light_z")
            c.light_dir.z = parse_real(kv);
        else if (kv.key == "background_zenith_r")
            c.background_zenith[0] = static_cast<float>(parse_real(kv));
        else if (kv.key == "background_zenith_g")
            c.background_zenith[1] = static_cast<float>(parse_real(kv));
        else if (kv.key == "background_zenith_b")
            c.background_zenith[2] = static_cast<float>(parse_real(kv));
        else if (kv.key == "background_horizon_r")
            c.background_horizon[0] = static_cast<float>(parse_real(kv));
        else if (kv.key == "background_horizon_g")
            c.background_horizon[1] = static_cast<float>(parse_real(kv));
        else if (kv.key == "background_horizon_b")
            c.background_horizon[2] = static_cast<float>(parse_real(kv));
        else if (kv.key == "cull_frustum")
            c.cull_frustum = parse_bool(kv);
        else if (kv.key == "cull_chunks")
            c.cull_chunks = parse_bool(kv);
        else if (kv.key == "cull_occlusion")
            c.cull_occlusion = parse_bool(kv);
        else if (kv.key == "threads")
            c.threads = parse_int(kv);
        else if (kv.key == "scheme")
            c.scheme = kv.value;
        else if (kv.key == "template_config")
            c.template_config = kv.value;
        else
            throw ParseError(kv.line, "unknown config key '" + kv.key + "'");

        if (kv.key == "width" || kv.key == "height") {
            if ((kv.key == "width" ? c.width : c.height) <= 0)
                throw ParseError(kv.line, "resolution must be positive");
        }
        if (kv.key == "threads" && c.threads < 0)
            throw ParseError(kv.line, "threads must be >= 0");
    }
    return c;
}

void dump_render_config(std::ostream& out, const RenderConfig& c) {
    out << "width = " << c.width << '\n';
    out << "height = " << c.height << '\n';
    out << "vertical_fov = " << real_text(c.vertical_fov) << '\n';
    out << "near_plane = " << real_text(c.near_plane) << '\n';
    out << "far_plane = " << real_text(c.far_plane) << '\n';
    out << "cam_pos_x = " << real_text(c.cam_pos.x) << '\n';
    out << "cam_pos_y = " << real_text(c.cam_pos.y) << '\n';
    out << "cam_pos_z = " << real_text(c.cam_pos.z) << '\n';
    out << "cam_target_x = " << real_text(c.cam_target.x) << '\n';
    out << "cam_target_y = " << real_text(c.cam_target.y) << '\n';
    out << "cam_target_z = " << real_text(c.cam_target.z) << '\n';
    out << "global_seed = " << c.global_seed << '\n';
    out << "light_x = " << real_text(c.light_dir.x) << '\n';
    out << "light_y = " << real_text(c.light_dir.y) << '\n';
    out << "light_z = " << real_text(c.light_dir.z) << '\n';
    out << "background_zenith_r = " << real_text(c.background_zenith[0]) << '\n';
    out << "background_zenith_g = " << real_text(c.background_zenith[1]) << '\n';
    out << "background_zenith_b = " << real_text(c.background_zenith[2]) << '\n';
    out << "background_horizon_r = " << real_text(c.background_horizon[0]) << '\n';
    out << "background_horizon_g = " << real_text(c.background_horizon[1]) << '\n';
    out << "background_horizon_b = " << real_text(c.background_horizon[2]) << '\n';
    out << "cull_frustum = " << (c.cull_frustum ? "true" : "false") << '\n';
    out << "cull_chunks = " << (c.cull_chunks ? "true" : "false") << '\n';
    out << "cull_occlusion = " << (c.cull_occlusion ? "true" : "false") << '\n';
    out << "threads = " << c.threads << '\n';
    out << "scheme = " << c.scheme << '\n';
    out << "template_config = " << c.template_config << '\n';
}

namespace {

[[noreturn]] void path_fail(const std::string& msg) {
    throw FormatError(FormatErrorKind::Corrupt, "camera path: " + msg);
}

Vec3 json_vec3(const nlohmann::json& j, const char* what) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
        !j[2].is_number())
        path_fail(std::string(what) + " must be an array of 3 numbers");
    const Vec3 v{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z))
        path_fail(std::string(what) + " must be finite");
    return v;
}

}  // namespace

CameraPath parse_camera_path(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        path_fail(e.what());
    }
    if (!doc.is_object()) path_fail("top level must be an object");

    CameraPath path;
    if (doc.contains("frame_rate")) {
        if (!doc["frame_rate"].is_number()) path_fail("frame_rate must be a number");
        path.frame_rate = doc["frame_rate"].get<double>();
    }
    if (!std::isfinite(path.frame_rate) || path.frame_rate <= 0.0)
        path_fail("frame_rate must be positive");

    if (!doc.contains("keyframes") || !doc["keyframes"].is_array())
        path_fail("missing keyframes array");
    for (const nlohmann::json& kj : doc["keyframes"]) {
        if (!kj.is_object()) path_fail("keyframe must be an object");
        if (!kj.contains("time") || !kj["time"].is_number())
            path_fail("keyframe needs a numeric time");
        CameraKeyframe kf;
        kf.time = kj["time"].get<double>();
        if (!std::isfinite(kf.time)) path_fail("keyframe time must be finite");
        if (!kj.contains("position")) path_fail("keyframe needs a position");
        if (!kj.contains("look_at")) path_fail("keyframe needs a look_at");
        kf.position = json_vec3(kj["position"], "position");
        kf.look_at = json_vec3(kj["look_at"], "look_at");
        path.keyframes.push_back(kf);
    }
    if (path.keyframes.empty()) path_fail("need at least one keyframe");
    for (std::size_t i = 1; i < path.keyframes.size(); ++i)
        if (!(path.keyframes[i].time > path.keyframes[i - 1].time))
            path_fail("keyframe times must be strictly increasing");
    return path;
}

CameraPose sample_camera_path(const CameraPath& path, double time) {
    const std::vector<CameraKeyframe>& keys = path.keyframes;
    if (keys.empty()) throw std::invalid_argument("sample_camera_path: empty path");
    if (time <= keys.front().time) return {keys.front().position, keys.front().look_at};
    if (time >= keys.back().time) return {keys.back().position, keys.back().look_at};
    const auto after = std::upper_bound(
        keys.begin(), keys.end(), time,
        [](double t, const CameraKeyframe& k) { return t < k.time; });
    const CameraKeyframe& b = *after;
    const CameraKeyframe& a = *(after - 1);
    const double u = (time - a.time) / (b.time - a.time);
    return {lerp(a.position, b.position, u), lerp(a.look_at, b.look_at, u)};
}

std::vector<double> camera_path_frame_times(const CameraPath& path) {
    if (path.keyframes.empty())
        throw std::invalid_argument("camera_path_frame_times: empty path");
    const double t0 = path.keyframes.front().time;
    const double t1 = path.keyframes.back().time;
    const double dt = 1.0 / path.frame_rate;
    std::vector<double> times;
    for (std::size_t i = 0;; ++i) {
        const double t = t0 + static_cast<double>(i) * dt;
        if (t > t1 + dt * 1e-9) break;
        times.push_back(t);
    }
    if (times.empty()) times.push_back(t0);
    return times;
}

}  // namespace pointamp
