#pragma once

#include "flatcrit/geom.hpp"

#include <memory>
#include <string>
#include <vector>

namespace flatcrit {

struct EdgeRef {
    int poly = -1;
    int edge = -1;
    bool valid() const { return poly >= 0; }
    bool operator==(const EdgeRef& o) const { return poly == o.poly && edge == o.edge; }
};

struct ConePoint {
    std::vector<std::pair<int, int>> corners;  // (polygon, vertex index), cyclic order
    int turns = 0;                             // cone angle = 2*pi*turns; 0 for boundary classes
    bool boundary = false;
};

struct ValidationReport {
    std::vector<std::string> issues;
    bool ok() const { return issues.empty(); }
};

struct SurfaceData {
    std::int64_t field_d = 0;
    std::string label;
    std::vector<std::string> polygon_names;
    std::vector<std::vector<Vec2q>> polygons;
    std::vector<std::array<int, 4>> gluings;   // {poly, edge, poly, edge}
    std::vector<std::pair<int, int>> boundary; // marked truncation edges
};

/// Polygons glued edge-to-edge by translations. Immutable once built; exact
/// coordinates throughout. All combinatorial queries are exact.
class TranslationSurface {
public:
    /// Validates everything build-time-checkable; throws Error naming the
    /// offending polygon/edge on structural defects.
    static TranslationSurface build(const SurfaceData& data);

    std::int64_t field() const { return field_d_; }
    const std::string& label() const { return label_; }
    const std::string& polygon_name(int p) const { return names_[p]; }

    int num_polygons() const { return static_cast<int>(polys_.size()); }
    const std::vector<Vec2q>& polygon(int p) const { return polys_[p]; }
    int num_edges(int p) const { return static_cast<int>(polys_[p].size()); }
    const Vec2q& vertex(int p, int v) const { return polys_[p][v]; }
    Vec2q edge_vector(int p, int e) const {
        const auto& poly = polys_[p];
        return poly[(e + 1) % poly.size()] - poly[e];
    }

    EdgeRef partner(int p, int e) const { return partners_[p][e]; }
    bool edge_is_boundary(int p, int e) const { return boundary_[p][e]; }
    bool edge_is_glued(int p, int e) const { return partners_[p][e].valid(); }
    /// Translation applied to a point crossing out through edge (p, e).
    const Vec2q& gluing_shift(int p, int e) const { return shifts_[p][e]; }
    bool has_boundary() const { return has_boundary_; }

    int num_vertex_classes() const { return static_cast<int>(classes_.size()); }
    int vertex_class(int p, int v) const { return vclass_[p][v]; }
    const ConePoint& cone_point(int c) const { return classes_[c]; }
    std::vector<ConePoint> cone_angles() const { return classes_; }

    QuadNum area_exact() const;
    double area() const { return area_exact().to_double(); }

    /// Full invariant re-check; violations become report entries, never throws.
    ValidationReport validate() const;

    /// Exact SL(2)-action: post-compose every chart with M. Requires det M = 1.
    TranslationSurface apply_matrix(const Mat2q& m) const;

    SurfaceData data() const;

    /// Corner wedge at vertex v of polygon p: directions from u_out CCW to
    /// -u_in spanning the interior angle (possibly >= pi).
    Vec2q corner_dir_out(int p, int v) const;
    Vec2q corner_dir_in_neg(int p, int v) const;
    /// Split the interior wedge into strict sub-cones each spanning < pi.
    std::vector<Cone> corner_subwedges(int p, int v) const;
    bool corner_wedge_contains_strict(int p, int v, const Vec2q& d) const;

    /// Next corner counterclockwise around the vertex class (crossing the
    /// incoming edge); invalid EdgeRef-style pair {-1,-1} at a boundary edge.
    std::pair<int, int> corner_next(int p, int v) const;
    std::pair<int, int> corner_prev(int p, int v) const;

    bool all_convex() const { return all_convex_; }

private:
    TranslationSurface() = default;
    void build_classes();

    std::int64_t field_d_ = 0;
    std::string label_;
    std::vector<std::string> names_;
    std::vector<std::vector<Vec2q>> polys_;
    std::vector<std::vector<EdgeRef>> partners_;
    std::vector<std::vector<bool>> boundary_;
    std::vector<std::vector<Vec2q>> shifts_;
    std::vector<std::vector<int>> vclass_;
    std::vector<ConePoint> classes_;
    bool has_boundary_ = false;
    bool all_convex_ = true;
};

/// Approximate-kind deformation: the base surface with every chart
/// post-composed with a real matrix. Combinatorics (gluings, classes) are the
/// base's; metric quantities go through the matrix.
struct DeformedSurface {
    std::shared_ptr<const TranslationSurface> base;
    Mat2d m;

    std::array<double, 2> vertex(int p, int v) const { return m.apply(base->vertex(p, v)); }
    double area() const { return base->area() * m.det(); }
    DeformedSurface then(const Mat2d& next) const { return {base, next.mul(m)}; }
};

DeformedSurface geodesic_deform(std::shared_ptr<const TranslationSurface> s, double t);
DeformedSurface apply_matrix_approx(std::shared_ptr<const TranslationSurface> s, const Mat2d& m);

/// One parallel saddle connection found by separatrix tracing, oriented so
/// holonomy = tau * direction with tau > 0.
struct ParallelConnection {
    QuadNum tau;  // holonomy = tau * d
    int start_class = -1, end_class = -1;
    int start_poly = -1, start_vertex = -1;
    struct Segment {
        int poly;
        Vec2q a, b;
    };
    std::vector<Segment> segments;
};

struct Cylinder {
    Vec2q waist_holonomy;
    double waist = 0;
    double height = 0;
    std::vector<ParallelConnection> boundary_connections;
};

struct CylinderDecomposition {
    std::vector<Cylinder> cylinders;
    bool residual = false;  // separatrices unresolved within the bound: minimal-or-unknown
    std::vector<ParallelConnection> connections;
};

/// All cylinders in direction d with waist length <= length_bound, by tracing
/// separatrices from every cone point until they close or exceed the bound.
CylinderDecomposition cylinder_decomposition(const TranslationSurface& s, const Vec2q& d,
                                             double length_bound);

TranslationSurface make_square_torus();
TranslationSurface make_regular_octagon();  // unit side, field Q(sqrt 2)

}  // namespace flatcrit
