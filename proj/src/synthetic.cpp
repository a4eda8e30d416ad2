#include "pointamp/synthetic.hpp"

#include <algorithm>
#include <cstddef>
#include <stdexcept>

namespace pointamp {

namespace {

// Counter-mode SplitMix64 stream; identical sequences on every platform.
class SplitMixStream {
public:
    explicit SplitMixStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() { return splitmix64(state_++); }
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

private:
    std::uint64_t state_;
};

RawPoint make_point(const Vec3& pos, CanonicalClass cls) {
    RawPoint p;
    p.pos = pos;
    p.class_code = static_cast<std::uint8_t>(cls);
    return p;
}

}  // namespace

std::vector<RawPoint> synthetic_cluster(int count, double spacing, CanonicalClass cls) {
    if (count <= 0) throw std::invalid_argument("synthetic_cluster: count must be positive");
    struct Cell {
        int x, y;
    };
    std::vector<Cell> cells;
    const int reach = 1 + static_cast<int>(std::sqrt(static_cast<double>(count)));
    for (int y = -reach; y <= reach; ++y)
        for (int x = -reach; x <= reach; ++x) cells.push_back({x, y});
    std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
        const int ra = a.x * a.x + a.y * a.y;
        const int rb = b.x * b.x + b.y * b.y;
        if (ra != rb) return ra < rb;
        if (a.x != b.x) return a.x < b.x;
        return a.y < b.y;
    });
    std::vector<RawPoint> points;
    points.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        points.push_back(make_point(Vec3{cells[i].x * spacing, cells[i].y * spacing, 0.0}, cls));
    return points;
}

std::vector<RawPoint> synthetic_wall(double half_width, double height, double spacing,
                                     CanonicalClass cls) {
    if (spacing <= 0.0 || half_width <= 0.0 || height <= 0.0)
        throw std::invalid_argument("synthetic_wall: dimensions must be positive");
    std::vector<RawPoint> points;
    const int nx = static_cast<int>(std::floor(2.0 * half_width / spacing)) + 1;
    const int nz = static_cast<int>(std::floor(height / spacing)) + 1;
    points.reserve(static_cast<std::size_t>(nx) * nz);
    for (int iz = 0; iz < nz; ++iz)
        for (int ix = 0; ix < nx; ++ix)
            points.push_back(
                make_point(Vec3{-half_width + ix * spacing, 0.0, iz * spacing}, cls));
    return points;
}

std::vector<RawPoint> synthetic_scatter(std::size_t count, const Vec3& box_min,
                                        const Vec3& box_max, CanonicalClass cls,
                                        std::uint64_t seed) {
    SplitMixStream rng(seed);
    std::vector<RawPoint> points;
    points.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        points.push_back(make_point(Vec3{rng.next_in(box_min.x, box_max.x),
                                         rng.next_in(box_min.y, box_max.y),
                                         rng.next_in(box_min.z, box_max.z)},
                                    cls));
    return points;
}

std::vector<RawPoint> synthetic_wall_scene(std::uint64_t seed) {
    std::vector<RawPoint> points =
        synthetic_wall(10.0, 10.0, 0.25, CanonicalClass::Building);
    const std::vector<RawPoint> clutter =
        synthetic_scatter(200, Vec3{-4.0, 8.0, 0.5}, Vec3{4.0, 16.0, 3.0},
                          CanonicalClass::Vegetation, seed);
    points.insert(points.end(), clutter.begin(), clutter.end());
    return points;
}

std::vector<RawPoint> synthetic_tile(std::size_t count, double extent, std::uint64_t seed) {
    if (extent <= 0.0) throw std::invalid_argument("synthetic_tile: extent must be positive");
    SplitMixStream rng(seed);

    std::vector<Vec3> clumps;
    const std::size_t clump_count = std::max<std::size_t>(1, count / 400);
    for (std::size_t i = 0; i < clump_count; ++i)
        clumps.push_back(Vec3{rng.next_in(0.0, extent), rng.next_in(0.0, extent),
                              rng.next_in(2.0, 6.0)});

    std::vector<Vec3> blocks;
    const std::size_t block_count = std::max<std::size_t>(1, count / 5000);
    for (std::size_t i = 0; i < block_count; ++i)
        blocks.push_back(Vec3{rng.next_in(0.0, extent), rng.next_in(0.0, extent), 0.0});

    std::vector<RawPoint> points;
    points.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double pick = rng.next_unit();
        if (pick < 0.7) {
            points.push_back(make_point(Vec3{rng.next_in(0.0, extent), rng.next_in(0.0, extent),
                                             rng.next_in(0.0, 0.15)},
                                        CanonicalClass::Ground));
        } else if (pick < 0.9) {
            const Vec3& c = clumps[rng.next_u64() % clumps.size()];
            points.push_back(make_point(Vec3{c.x + rng.next_in(-2.5, 2.5),
                                             c.y + rng.next_in(-2.5, 2.5),
                                             std::max(0.3, c.z + rng.next_in(-2.0, 2.0))},
                                        CanonicalClass::Vegetation));
        } else {
            const Vec3& b = blocks[rng.next_u64() % blocks.size()];
            points.push_back(make_point(Vec3{b.x + rng.next_in(-6.0, 6.0),
                                             b.y + rng.next_in(-6.0, 6.0),
                                             rng.next_in(0.0, 6.0)},
                                        CanonicalClass::Building));
        }
    }
    return points;
}

}  // namespace pointamp
