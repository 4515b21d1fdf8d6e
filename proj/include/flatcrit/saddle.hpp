#pragma once

#include "flatcrit/surface.hpp"

#include <optional>

namespace flatcrit {

struct SaddleConnection {
    Vec2q holonomy;
    int start_class = -1, end_class = -1;
    std::vector<std::pair<int, int>> development_path;  // (polygon, entry edge)

    QuadNum length2() const { return holonomy.norm2(); }
    double length() const { return holonomy.length(); }
};

struct EnumerateResult {
    std::vector<SaddleConnection> connections;  // sorted by (length, x, y, start, end)
    bool truncation_warning = false;            // boundary limited the search
};

/// All oriented saddle connections of length <= bound, each exactly once
/// (deduplicated by start class, end class, exact holonomy). The length
/// comparison against the bound is exact (the double bound is a rational).
EnumerateResult enumerate_saddle_connections(const TranslationSurface& s, double bound);

/// Shortest saddle connection by doubling enumeration; ties broken by
/// (length, |x|, start class) so the witness is deterministic.
std::pair<double, SaddleConnection> shortest_saddle_connection(const TranslationSurface& s);

/// Same, in the metric deformed by `m` (approximate kind): minimizes |m h|
/// over exactly enumerated base connections, enumeration radius certified by
/// doubling.
std::pair<double, SaddleConnection> shortest_saddle_connection_deformed(
    const TranslationSurface& s, const Mat2d& m);

struct SystoleEstimate {
    double lower_proxy = 0;        // shortest saddle connection
    double closed_curve_upper = 0; // min over cylinder waists and closed loops
};

SystoleEstimate systole_estimate(const TranslationSurface& s, double search_bound);

struct DiameterEstimate {
    double lower = 0;
    double upper = 0;
    bool upper_valid = true;  // refused when the surface has marked boundary
};

/// Net-based bracket: lower = max over net pairs of the exact flat distance
/// (straight developments plus bends at cone points); upper = lower + twice
/// the net cover radius (a documented approximation of the covering term).
DiameterEstimate diameter_estimate(const TranslationSurface& s, int sample_count);
DiameterEstimate diameter_estimate_deformed(const TranslationSurface& s, const Mat2d& m,
                                            int sample_count);

/// Exact flat distance between two surface points (deformed metric optional).
double flat_distance(const TranslationSurface& s, int poly_a, const Vec2q& a, int poly_b,
                     const Vec2q& b, const Mat2d& m = Mat2d::identity());

std::string connections_to_csv(const std::vector<SaddleConnection>& cs);

}  // namespace flatcrit
