#pragma once

#include "flatcrit/surface.hpp"
#include "flatcrit/trace.hpp"

#include <optional>

namespace flatcrit {

struct Trajectory {
    TraceStatus status = TraceStatus::Completed;
    double length = 0;
    int end_poly = -1;
    double end_x = 0, end_y = 0;
    std::vector<ApproxStep> segments;
};

/// Straight-line flow for the given metric length; exact crossing decisions
/// (the stopping length itself is a metric-level input). Starts on edges are
/// fine; a start at a cone point throws "starts at singularity".
Trajectory trace(const TranslationSurface& s, int poly, const Vec2q& start, const Vec2q& dir,
                 double length, bool record_segments = true);

/// Approximate-kind variant (double data, guard band at vertices).
Trajectory trace_approx(const TranslationSurface& s, int poly, double sx, double sy, double dx,
                        double dy, double length, bool record_segments = true);

struct IET {
    std::vector<double> lengths;       // interval lengths in transversal arclength
    std::vector<int> permutation;      // interval i is the permutation[i]-th after the map
    double total = 0;
    std::vector<double> image_starts;  // arclength positions of the mapped intervals
};

/// First-return map of the flow in direction `dir` to the glued edge
/// `transversal`, as an interval exchange: breakpoints are the first backward
/// hits of the cone points, return offsets come from one exact forward orbit
/// per interval. Errors on any subinterval that fails to return within
/// max_length.
IET first_return_iet(const TranslationSurface& s, EdgeRef transversal, const Vec2q& dir,
                     double max_length);

enum class ObservableKind { One, StripX, StripY, CosX, SinX, CosY, SinY };

struct Observable {
    ObservableKind kind = ObservableKind::One;
    double a = 0, b = 0;  // strip bounds
    int harmonic = 1;     // frequency for the trigonometric observables

    static Observable one() { return {}; }
    static Observable strip_x(double a, double b) { return {ObservableKind::StripX, a, b, 1}; }
    static Observable strip_y(double a, double b) { return {ObservableKind::StripY, a, b, 1}; }
};

struct BirkhoffResult {
    std::vector<double> averages;  // per start; NaN for flagged starts
    std::vector<int> flagged;      // indices of singular/escaped starts
    double dispersion = 0;         // max pairwise difference over valid starts
};

/// Time averages (1/T) int_0^T f(phi_t x) dt, segment-wise in closed form.
BirkhoffResult birkhoff_average(const TranslationSurface& s, const Vec2q& dir,
                                const Observable& f, double time_budget,
                                const std::vector<std::pair<int, Vec2q>>& starts,
                                int threads = 1);

struct EquidistResult {
    int bins = 0;
    double discrepancy = 1;        // max over cells |occupancy - area fraction|
    TraceStatus status = TraceStatus::Completed;
    std::vector<double> occupancy;
    std::vector<double> area_fraction;
};

EquidistResult equidistribution_test(const TranslationSurface& s, const Vec2q& dir, int poly,
                                     const Vec2q& start, double time_budget, int bins);

/// Area-uniform random surface points, deterministic in the seed.
std::vector<std::pair<int, Vec2q>> random_starts(const TranslationSurface& s, int count,
                                                 std::uint64_t seed);

/// Fraction of seeded random starts whose trajectory crosses the marked
/// boundary before the time budget; 0 on closed surfaces.
double escape_mass_estimate(const TranslationSurface& s, const Vec2q& dir, double time_budget,
                            int sample_count, std::uint64_t seed, int threads = 1);

std::string trajectory_to_csv(const Trajectory& traj);
std::string histogram_to_json(const EquidistResult& r);

/// Chamanara-type truncation: unit square, horizontal and vertical sides cut
/// into dyadic segments glued by the mirrored geometric pattern through level
/// N; the dyadic remainders become marked boundary. Area exactly 1.
TranslationSurface chamanara_surface(int level);

}  // namespace flatcrit
