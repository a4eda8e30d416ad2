#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "pointamp/ingest.hpp"
#include "pointamp/math.hpp"

namespace pointamp {

struct CellCoord {
    std::int64_t x = 0;
    std::int64_t y = 0;
    std::int64_t z = 0;

    constexpr bool operator==(const CellCoord& o) const = default;
    constexpr auto operator<=>(const CellCoord& o) const = default;
};

struct CellCoordHash {
    std::size_t operator()(const CellCoord& c) const {
        std::uint64_t h = hash_combine(0x9ae16a3b2f90404fULL, static_cast<std::uint64_t>(c.x));
        h = hash_combine(h, static_cast<std::uint64_t>(c.y));
        h = hash_combine(h, static_cast<std::uint64_t>(c.z));
        return static_cast<std::size_t>(h);
    }
};

// Two-level grid-bucket index: cells of edge cell_size, grouped into chunks
// of chunk_factor cells per edge. Immutable after build; any number of
// threads may query it concurrently.
struct GridIndex {
    double cell_size = 1.0;
    Vec3 origin;
    int chunk_factor = 8;
    std::vector<RawPoint> points;
    std::unordered_map<CellCoord, std::vector<std::uint32_t>, CellCoordHash> buckets;

    CellCoord cell_of(const Vec3& p) const {
        return {static_cast<std::int64_t>(std::floor((p.x - origin.x) / cell_size)),
                static_cast<std::int64_t>(std::floor((p.y - origin.y) / cell_size)),
                static_cast<std::int64_t>(std::floor((p.z - origin.z) / cell_size))};
    }

    CellCoord chunk_of(const CellCoord& cell) const {
        const auto div = [this](std::int64_t v) {
            const std::int64_t f = chunk_factor;
            return v >= 0 ? v / f : -((-v + f - 1) / f);
        };
        return {div(cell.x), div(cell.y), div(cell.z)};
    }
};

// Coarse culling group. The aabb covers every member's center inflated by
// its bounding radius; the sphere encloses the aabb.
struct Chunk {
    CellCoord coord;
    Vec3 aabb_min;
    Vec3 aabb_max;
    Vec3 sphere_center;
    double sphere_radius = 0.0;
    std::vector<std::uint32_t> packet_indices;
};

// Builds the index. origin is the componentwise minimum of the positions;
// buckets list point indices in ascending order. Throws std::invalid_argument
// on an empty cloud or non-positive cell_size.
GridIndex build_grid(std::vector<RawPoint> points, double cell_size, int chunk_factor);

// 2x the median nearest-neighbor spacing over a deterministic sample of at
// most 1000 points (stride-sampled). Falls back to 1 m when degenerate.
double estimate_cell_size(std::span<const RawPoint> points, std::string_view scheme = "dales");

// Exact k nearest neighbors sharing the query's canonical class, the query
// itself excluded, ordered by (distance, point index). All results lie
// within radius_max. Matches brute force under the same tie rule.
std::vector<std::uint32_t> knn_same_class(const GridIndex& index, std::uint32_t query_idx,
                                          int k, double radius_max,
                                          std::string_view scheme = "dales");

// Same query against caller-supplied per-point classes (one per indexed
// point). Lets the packet builder search with reclassification applied.
std::vector<std::uint32_t> knn_same_class(const GridIndex& index, std::uint32_t query_idx,
                                          int k, double radius_max,
                                          std::span<const CanonicalClass> classes);

// Groups per-cell packet membership into chunks (floor(cell/chunk_factor)).
// centers/radii run parallel to the packet list the indices refer to.
// Output is sorted by chunk coordinate; indices ascend within each chunk.
std::vector<Chunk> build_chunks(const GridIndex& index, std::span<const Vec3> centers,
                                std::span<const float> radii);

}  // namespace pointamp
