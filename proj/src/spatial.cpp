#include "pointamp/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pointamp {

GridIndex build_grid(std::vector<RawPoint> points, double cell_size, int chunk_factor) {
    if (points.empty()) throw std::invalid_argument("build_grid: empty point list");
    if (!(cell_size > 0.0)) throw std::invalid_argument("build_grid: cell_size must be > 0");
    if (chunk_factor < 1) throw std::invalid_argument("build_grid: chunk_factor must be >= 1");

    GridIndex index;
    index.cell_size = cell_size;
    index.chunk_factor = chunk_factor;
    index.points = std::move(points);

    Vec3 lo = index.points[0].pos;
    for (const RawPoint& p : index.points) lo = cwise_min(lo, p.pos);
    index.origin = lo;

    index.buckets.reserve(index.points.size());
    for (std::uint32_t i = 0; i < index.points.size(); ++i)
        index.buckets[index.cell_of(index.points[i].pos)].push_back(i);
    return index;
}

double estimate_cell_size(std::span<const RawPoint> points, std::string_view scheme) {
    (void)scheme;
    if (points.size() < 2) return 1.0;
    const std::size_t sample_count = std::min<std::size_t>(points.size(), 1000);
    const std::size_t stride = points.size() / sample_count;
    std::vector<Vec3> sample;
    sample.reserve(sample_count);
    for (std::size_t i = 0; i < sample_count; ++i) sample.push_back(points[i * stride].pos);

    std::vector<double> nearest;
    nearest.reserve(sample.size());
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < sample.size(); ++j) {
            if (j == i) continue;
            best = std::min(best, length_squared(sample[i] - sample[j]));
        }
        if (std::isfinite(best)) nearest.push_back(std::sqrt(best));
    }
    if (nearest.empty()) return 1.0;
    std::nth_element(nearest.begin(), nearest.begin() + nearest.size() / 2, nearest.end());
    const double median = nearest[nearest.size() / 2];
    return median > 1e-9 ? 2.0 * median : 1.0;
}

std::vector<std::uint32_t> knn_same_class(const GridIndex& index, std::uint32_t query_idx,
                                          int k, double radius_max,
                                          std::span<const CanonicalClass> classes) {
    if (query_idx >= index.points.size())
        throw std::out_of_range("knn_same_class: invalid query index");
    if (classes.size() != index.points.size())
        throw std::invalid_argument("knn_same_class: one class per indexed point required");
    if (k < 1 || k > 8) throw std::invalid_argument("knn_same_class: k must be in 1..8");
    if (!(radius_max > 0.0)) throw std::invalid_argument("knn_same_class: radius_max must be > 0");

    const RawPoint& query = index.points[query_idx];
    const CanonicalClass want = classes[query_idx];
    const Vec3 q = query.pos;
    const CellCoord qc = index.cell_of(q);
    const double h = index.cell_size;
    const double r2_max = radius_max * radius_max;

    // (squared distance, index) candidates; kth_best tracks the pruning bound.
    std::vector<std::pair<double, std::uint32_t>> best;
    const auto kth_bound = [&]() {
        return best.size() < static_cast<std::size_t>(k)
                   ? r2_max
                   : std::min(r2_max, best[k - 1].first);
    };

    const auto visit_cell = [&](const CellCoord& c) {
        auto it = index.buckets.find(c);
        if (it == index.buckets.end()) return;
        for (std::uint32_t idx : it->second) {
            if (idx == query_idx) continue;
            const RawPoint& cand = index.points[idx];
            if (classes[idx] != want) continue;
            const double d2 = length_squared(cand.pos - q);
            if (d2 > r2_max) continue;
            best.emplace_back(d2, idx);
        }
        std::sort(best.begin(), best.end());
        if (best.size() > static_cast<std::size_t>(k)) best.resize(k);
    };

    visit_cell(qc);
    for (std::int64_t shell = 1;; ++shell) {
        // Minimum possible distance from q to any cell outside the box of
        // half-width (shell-1) cells around the query cell: once the current
        // k-th best beats it, no farther shell can contribute.
        const double lo_x = q.x - (index.origin.x + static_cast<double>(qc.x - shell + 1) * h);
        const double hi_x = (index.origin.x + static_cast<double>(qc.x + shell) * h) - q.x;
        const double lo_y = q.y - (index.origin.y + static_cast<double>(qc.y - shell + 1) * h);
        const double hi_y = (index.origin.y + static_cast<double>(qc.y + shell) * h) - q.y;
        const double lo_z = q.z - (index.origin.z + static_cast<double>(qc.z - shell + 1) * h);
        const double hi_z = (index.origin.z + static_cast<double>(qc.z + shell) * h) - q.z;
        const double min_dist = std::max(
            0.0, std::min({lo_x, hi_x, lo_y, hi_y, lo_z, hi_z}));
        if (min_dist * min_dist > kth_bound()) break;

        for (std::int64_t dz = -shell; dz <= shell; ++dz) {
            for (std::int64_t dy = -shell; dy <= shell; ++dy) {
                for (std::int64_t dx = -shell; dx <= shell; ++dx) {
                    if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != shell) continue;
                    visit_cell({qc.x + dx, qc.y + dy, qc.z + dz});
                }
            }
        }
    }

    std::vector<std::uint32_t> out;
    out.reserve(best.size());
    for (const auto& [d2, idx] : best) out.push_back(idx);
    return out;
}

std::vector<std::uint32_t> knn_same_class(const GridIndex& index, std::uint32_t query_idx,
                                          int k, double radius_max, std::string_view scheme) {
    const ClassMap& cmap = class_map(scheme);
    std::vector<CanonicalClass> classes;
    classes.reserve(index.points.size());
    for (const RawPoint& p : index.points) classes.push_back(cmap.table[p.class_code]);
    return knn_same_class(index, query_idx, k, radius_max,
                          std::span<const CanonicalClass>(classes));
}

std::vector<Chunk> build_chunks(const GridIndex& index, std::span<const Vec3> centers,
                                std::span<const float> radii) {
    std::unordered_map<CellCoord, Chunk, CellCoordHash> by_coord;
    for (std::uint32_t i = 0; i < centers.size(); ++i) {
        const CellCoord cc = index.chunk_of(index.cell_of(centers[i]));
        auto [it, fresh] = by_coord.try_emplace(cc);
        Chunk& chunk = it->second;
        const Vec3 r{radii[i], radii[i], radii[i]};
        if (fresh) {
            chunk.coord = cc;
            chunk.aabb_min = centers[i] - r;
            chunk.aabb_max = centers[i] + r;
        } else {
            chunk.aabb_min = cwise_min(chunk.aabb_min, centers[i] - r);
            chunk.aabb_max = cwise_max(chunk.aabb_max, centers[i] + r);
        }
        chunk.packet_indices.push_back(i);
    }

    std::vector<Chunk> chunks;
    chunks.reserve(by_coord.size());
    for (auto& [coord, chunk] : by_coord) {
        chunk.sphere_center = (chunk.aabb_min + chunk.aabb_max) * 0.5;
        chunk.sphere_radius = length(chunk.aabb_max - chunk.sphere_center);
        chunks.push_back(std::move(chunk));
    }
    std::sort(chunks.begin(), chunks.end(),
              [](const Chunk& a, const Chunk& b) { return a.coord < b.coord; });
    return chunks;
}

}  // namespace pointamp
