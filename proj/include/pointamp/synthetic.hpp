#pragma once

#include <cstdint>
#include <vector>

#include "pointamp/ingest.hpp"
#include "pointamp/math.hpp"

namespace pointamp {

// Seeded synthetic point clouds for tests and demos. Class codes are the
// canonical values, so downstream stages use the "canonical" map scheme.

// `count` points on an integer lattice in the z = 0 plane, filled outward
// from the origin by ring, scaled by `spacing`. count == 5 gives the plus
// shape of one center point and its four axis neighbors.
std::vector<RawPoint> synthetic_cluster(int count, double spacing, CanonicalClass cls);

// Vertical sheet in the x-z plane at y = 0: a grid over [-half_width,
// half_width] x [0, height] at the given point spacing.
std::vector<RawPoint> synthetic_wall(double half_width, double height, double spacing,
                                     CanonicalClass cls);

// Uniform random points inside an axis-aligned box.
std::vector<RawPoint> synthetic_scatter(std::size_t count, const Vec3& box_min,
                                        const Vec3& box_max, CanonicalClass cls,
                                        std::uint64_t seed);

// Occlusion scene: a dense 20 m x 10 m building wall at y = 0 plus
// vegetation clutter scattered well behind it (y in [8, 16]). Viewed from
// y < 0 the wall fills the frame and hides every clutter point.
std::vector<RawPoint> synthetic_wall_scene(std::uint64_t seed);

// Aerial-survey-like tile over extent x extent meters: a ground carpet with
// vegetation clumps and building blocks mixed in. Exactly `count` points.
std::vector<RawPoint> synthetic_tile(std::size_t count, double extent, std::uint64_t seed);

}  // namespace pointamp
