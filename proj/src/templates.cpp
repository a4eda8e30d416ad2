#include "pointamp/templates.hpp"

#include <istream>
#include <string>

#include "kv_config.hpp"
#include "pointamp/error.hpp"
#include "pointamp/packets.hpp"

namespace pointamp {

TemplateTable default_template_table() {
    TemplateTable t;
    t[CanonicalClass::Ground] = {0.30, 0.05, 0.5, 2, 0.0, 0.5};
    t[CanonicalClass::Grass] = {0.30, 0.15, 3.0, 3, 0.25, 0.5};
    t[CanonicalClass::Road] = {0.30, 0.01, 0.5, 1, 0.0, 0.3};
    t[CanonicalClass::Vegetation] = {0.35, 0.25, 2.0, 3, 0.0, 0.5};
    t[CanonicalClass::Building] = {0.40, 0.0, 1.0, 1, 0.0, 0.3};
    t[CanonicalClass::Pole] = {0.06, 0.0, 1.0, 1, 0.0, 0.1};
    t[CanonicalClass::Fence] = {0.08, 0.0, 1.0, 1, 0.0, 0.1};
    t[CanonicalClass::Vehicle] = {0.30, 0.0, 1.0, 1, 0.0, 0.2};
    t[CanonicalClass::PowerLine] = {0.06, 0.0, 1.0, 1, 0.0, 0.1};
    t[CanonicalClass::Unknown] = {0.15, 0.0, 1.0, 1, 0.0, 0.2};
    return t;
}

MaterialTable default_materials() {
    MaterialTable m;
    auto set = [&](CanonicalClass c, Rgb diffuse, float specular, float roughness) {
        m[static_cast<int>(c)] = Material{diffuse, specular, roughness};
    };
    set(CanonicalClass::Ground, {0.45f, 0.40f, 0.33f}, 0.02f, 0.95f);
    set(CanonicalClass::Grass, {0.25f, 0.46f, 0.18f}, 0.03f, 0.90f);
    set(CanonicalClass::Road, {0.32f, 0.32f, 0.34f}, 0.15f, 0.70f);
    set(CanonicalClass::Vegetation, {0.18f, 0.38f, 0.15f}, 0.04f, 0.90f);
    set(CanonicalClass::Building, {0.56f, 0.51f, 0.46f}, 0.10f, 0.80f);
    set(CanonicalClass::Pole, {0.35f, 0.35f, 0.38f}, 0.30f, 0.60f);
    set(CanonicalClass::Fence, {0.40f, 0.33f, 0.26f}, 0.05f, 0.85f);
    set(CanonicalClass::Vehicle, {0.60f, 0.16f, 0.15f}, 0.60f, 0.35f);
    set(CanonicalClass::PowerLine, {0.25f, 0.25f, 0.28f}, 0.30f, 0.50f);
    set(CanonicalClass::Unknown, {0.55f, 0.35f, 0.55f}, 0.05f, 0.90f);
    return m;
}

using detail::ConfigLine;
using detail::next_pair;
using detail::parse_real;

void apply_template_config(TemplateTable& table, std::istream& in) {
    int line_no = 0;
    for (ConfigLine kv = next_pair(in, line_no); kv.present; kv = next_pair(in, line_no)) {
        if (kv.key.rfind("material.", 0) == 0) continue;
        const std::size_t dot = kv.key.find('.');
        if (dot == std::string::npos)
            throw ParseError(kv.line, "expected <class>.<field> key, got '" + kv.key + "'");
        const auto cls = class_from_name(kv.key.substr(0, dot));
        if (!cls) throw ParseError(kv.line, "unknown class '" + kv.key.substr(0, dot) + "'");
        const std::string fieldname = kv.key.substr(dot + 1);
        TemplateParams& tp = table[*cls];
        const double v = parse_real(kv);
        if (fieldname == "capsule_radius") {
            if (v <= 0.0) throw ParseError(kv.line, "capsule_radius must be > 0");
            tp.capsule_radius = v;
        } else if (fieldname == "noise_amplitude") {
            if (v < 0.0) throw ParseError(kv.line, "noise_amplitude must be >= 0");
            tp.noise_amplitude = v;
        } else if (fieldname == "noise_frequency") {
            if (v <= 0.0) throw ParseError(kv.line, "noise_frequency must be > 0");
            tp.noise_frequency = v;
        } else if (fieldname == "octaves") {
            if (v < 1.0 || v != static_cast<int>(v))
                throw ParseError(kv.line, "octaves must be an integer >= 1");
            tp.octaves = static_cast<int>(v);
        } else if (fieldname == "taper") {
            if (v < 0.0 || v > 1.0) throw ParseError(kv.line, "taper must be in [0, 1]");
            tp.taper = v;
        } else if (fieldname == "blend_k") {
            if (v < 0.0) throw ParseError(kv.line, "blend_k must be >= 0");
            tp.blend_k = v;
        } else {
            throw ParseError(kv.line, "unknown template field '" + fieldname + "'");
        }
    }
}

void apply_material_config(MaterialTable& materials, std::istream& in) {
    int line_no = 0;
    for (ConfigLine kv = next_pair(in, line_no); kv.present; kv = next_pair(in, line_no)) {
        if (kv.key.rfind("material.", 0) != 0) continue;
        std::string rest = kv.key.substr(9);
        const std::size_t dot = rest.find('.');
        if (dot == std::string::npos)
            throw ParseError(kv.line, "expected material.<class>.<field> key");
        const auto cls = class_from_name(rest.substr(0, dot));
        if (!cls) throw ParseError(kv.line, "unknown class '" + rest.substr(0, dot) + "'");
        const std::string fieldname = rest.substr(dot + 1);
        Material& mat = materials[static_cast<int>(*cls)];
        const double v = parse_real(kv);
        if (fieldname == "diffuse_r") {
            mat.diffuse[0] = static_cast<float>(v);
        } else if (fieldname == "diffuse_g") {
            mat.diffuse[1] = static_cast<float>(v);
        } else if (fieldname == "diffuse_b") {
            mat.diffuse[2] = static_cast<float>(v);
        } else if (fieldname == "specular") {
            mat.specular = static_cast<float>(v);
        } else if (fieldname == "roughness") {
            mat.roughness = static_cast<float>(v);
        } else {
            throw ParseError(kv.line, "unknown material field '" + fieldname + "'");
        }
    }
}

}  // namespace pointamp
