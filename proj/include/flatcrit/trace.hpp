#pragma once

#include "flatcrit/surface.hpp"

namespace flatcrit {

enum class TraceStatus { Completed, HitSingularity, Escaped, BudgetOnEdge };

struct TraceStep {
    int poly = -1;
    Vec2q entry;
    Vec2q exit;
    int exit_edge = -1;  // edge index, or -1 when the step ends inside the polygon
};

struct ExactTrajectory {
    TraceStatus status = TraceStatus::Completed;
    QuadNum tau_total;          // accumulated direction-parameter
    int end_poly = -1;
    Vec2q end_point;
    int hit_class = -1;         // vertex class when HitSingularity
    EdgeRef escape_edge;        // when Escaped
    std::vector<TraceStep> steps;
};

/// Follow the straight line start + tau * dir across gluings for tau in
/// (0, tau_budget]. All crossing decisions are exact. The start must not be a
/// vertex; a start on an edge is fine (moved across the gluing if dir points
/// outward). Stops early at vertices (HitSingularity) and marked boundary
/// edges (Escaped).
ExactTrajectory trace_ray_exact(const TranslationSurface& s, int poly, Vec2q start, Vec2q dir,
                                const QuadNum& tau_budget, bool record_steps = false);

/// Trace a separatrix leaving vertex `vertex` of polygon `poly` in a direction
/// strictly inside that corner's wedge.
ExactTrajectory trace_from_vertex(const TranslationSurface& s, int poly, int vertex,
                                  const Vec2q& dir, const QuadNum& tau_budget,
                                  bool record_steps = false);

/// Each crossing of a chosen glued edge during a trace, reported exactly.
struct EdgeCrossing {
    QuadNum tau;      // parameter along the ray
    QuadNum u;        // position along the monitored edge, in [0, 1]
};

/// Like trace_ray_exact but also records crossings of the (p, e) edge pair.
ExactTrajectory trace_ray_monitored(const TranslationSurface& s, int poly, Vec2q start,
                                    Vec2q dir, const QuadNum& tau_budget, EdgeRef monitored,
                                    std::vector<EdgeCrossing>& crossings, int stop_afteret = -1);

/// Approximate-kind tracer (double coordinates/direction) with a guard band:
/// crossings within `guard` of a vertex stop conservatively at the singularity.
struct ApproxStep {
    int poly = -1;
    double entry_x = 0, entry_y = 0, exit_x = 0, exit_y = 0;
};

struct ApproxTrajectory {
    TraceStatus status = TraceStatus::Completed;
    double length = 0;
    int end_poly = -1;
    double end_x = 0, end_y = 0;
    std::vector<ApproxStep> steps;
};

ApproxTrajectory trace_ray_approx(const TranslationSurface& s, int poly, double sx, double sy,
                                  double dx, double dy, double length_budget,
                                  bool record_steps = false, double guard = 1e-12);

}  // namespace flatcrit
