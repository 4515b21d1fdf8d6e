#pragma once

#include "flatcrit/surface.hpp"

#include <limits>

namespace flatcrit {

/// Pruning region for the unfolding walk, measured after applying `metric`
/// to developed base coordinates. Pruning is conservative (slightly inflated
/// double tests); exact acceptance is the caller's job.
struct UnfoldRegion {
    Mat2d metric = Mat2d::identity();
    double radius = std::numeric_limits<double>::infinity();
    double xbound = std::numeric_limits<double>::infinity();
    double ybound = std::numeric_limits<double>::infinity();

    static UnfoldRegion disk(double r) {
        UnfoldRegion g;
        g.radius = r;
        return g;
    }
    static UnfoldRegion deformed_disk(const Mat2d& m, double r) {
        UnfoldRegion g;
        g.metric = m;
        g.radius = r;
        return g;
    }
    static UnfoldRegion rect(const Mat2d& m, double xb, double yb) {
        UnfoldRegion g;
        g.metric = m;
        g.xbound = xb;
        g.ybound = yb;
        g.radius = std::hypot(xb, yb);
        return g;
    }
};

/// A straight segment from a cone point to a cone point, found by developing
/// polygon chains; strict sheets, so the open segment avoids all vertices.
struct ConnectionCandidate {
    Vec2q holonomy;
    int start_class = -1, end_class = -1;
    std::vector<std::pair<int, int>> path;  // (polygon, entry edge) development chain
};

/// All candidates starting at vertex class `cls` whose deformed holonomy may
/// lie in the region. Edge-aligned connections (the glued edges themselves)
/// are not produced here. Sets *truncated when the walk stopped at marked
/// boundary edges.
std::vector<ConnectionCandidate> unfold_connections(const TranslationSurface& s, int cls,
                                                    const UnfoldRegion& region,
                                                    bool* truncated = nullptr);

struct ChordSource {
    int poly = -1;   // interior-point source
    Vec2q point;
    int cls = -1;    // or a vertex-class source
};

/// Exact straight-chord distances in the `region.metric` metric from the
/// source to each target (pairs of polygon, exact point), minimum over all
/// development sheets within region.radius. Unreachable targets get +inf.
/// Chords may graze cone points; combined with bends at cone points (a tiny
/// Dijkstra done by callers) these realize the exact flat distance.
std::vector<double> unfold_chords(const TranslationSurface& s, const ChordSource& src,
                                  const std::vector<std::pair<int, Vec2q>>& targets,
                                  const UnfoldRegion& region, bool* truncated = nullptr,
                                  std::size_t first_target = 0);

}  // namespace flatcrit
