#pragma once

#include <array>
#include <iosfwd>

#include "pointamp/ingest.hpp"

namespace pointamp {

// Per-class procedural template controls. The class is the prior: these six
// values fully determine how a packet's local field is shaped.
struct TemplateParams {
    double capsule_radius = 0.3;   // m
    double noise_amplitude = 0.0;  // m
    double noise_frequency = 1.0;  // 1/m
    int octaves = 1;
    double taper = 0.0;            // 0 = untapered; displacement fades to zero
                                   // at height noise_amplitude/taper above ground
    double blend_k = 0.3;          // m, smooth-min seam width
};

struct TemplateTable {
    std::array<TemplateParams, kClassCount> per_class;

    const TemplateParams& operator[](CanonicalClass c) const {
        return per_class[static_cast<int>(c)];
    }
    TemplateParams& operator[](CanonicalClass c) { return per_class[static_cast<int>(c)]; }

    double max_blend_k() const {
        double k = 0.0;
        for (const auto& p : per_class) k = k > p.blend_k ? k : p.blend_k;
        return k;
    }
};

TemplateTable default_template_table();

// Applies `<class>.<field> = value` overrides from a flat key=value config
// stream (templates.cfg). Unknown keys with a `material.` prefix are ignored
// here (the material loader owns them); anything else throws.
void apply_template_config(TemplateTable& table, std::istream& in);

}  // namespace pointamp
