#include "flatcrit/flow.hpp"

namespace flatcrit {

// Unit square with dyadic edge subdivisions. Horizontal sides: the bottom is
// cut from the left into lengths 1/2, 1/4, ..., 1/2^N plus a remainder, the
// top from the right; level-k segments are glued by translation. Vertical
// sides mirror the pattern: the left is cut from the bottom, the right from
// the top. The four remainder segments of length 1/2^N become marked
// boundary. The baker automorphism diag(2, 1/2) shifts horizontal levels
// down and vertical levels up by one.
TranslationSurface chamanara_surface(int level) {
    if (level < 1) throw Error("level must be at least 1");
    if (level > 48) throw Error("level too deep");
    SurfaceData d;
    d.field_d = 0;
    d.label = "chamanara-" + std::to_string(level);
    d.polygon_names = {"P"};

    auto frac = [&](long long num, int pow2) {
        return QuadNum(Rational(BigInt(num), BigInt(1) << pow2));
    };
    QuadNum zero(0), one(1);

    // cut positions 1/2, 3/4, ..., 1 - 2^-N  (and mirrored 2^-N, ..., 1/2)
    std::vector<QuadNum> from_zero, from_one;
    for (int k = 1; k <= level; ++k) {
        from_zero.push_back(one - frac(1, k));              // 0, then 1/2, 3/4, ...
        from_one.push_back(frac(1, k));                     // ..., 1/4, 1/2
    }

    std::vector<Vec2q> verts;
    // bottom, left to right: 0, 1/2, 3/4, ..., 1-2^-N
    verts.push_back({zero, zero});
    for (int k = 1; k <= level; ++k) verts.push_back({one - frac(1, k), zero});
    int bottom_first_edge = 0;  // edge k-1 is level-k for k=1..N; edge N = remainder

    // right, bottom to top: cut from the top => y = 2^-N, ..., 1/4, 1/2
    int right_first = static_cast<int>(verts.size());
    verts.push_back({one, zero});
    for (int k = level; k >= 1; --k) verts.push_back({one, frac(1, k)});
    // edge right_first = remainder, then level N, ..., level 1

    // top, right to left: 1/2, 1/4, ..., 2^-N
    int top_first = static_cast<int>(verts.size());
    verts.push_back({one, one});
    for (int k = 1; k <= level; ++k) verts.push_back({frac(1, k), one});
    // edge top_first + (k-1) = level-k; edge top_first + N = remainder

    // left, top to bottom: cut from the bottom => y = 1-2^-N, ..., 3/4, 1/2
    int left_first = static_cast<int>(verts.size());
    verts.push_back({zero, one});
    for (int k = level; k >= 1; --k) verts.push_back({zero, one - frac(1, k)});
    // edge left_first = remainder, then level N, ..., level 1

    d.polygons = {verts};
    for (int k = 1; k <= level; ++k) {
        int bottom_edge = bottom_first_edge + (k - 1);
        int top_edge = top_first + (k - 1);
        d.gluings.push_back({0, bottom_edge, 0, top_edge});
        int left_edge = left_first + 1 + (level - k);   // level-k on the left
        int right_edge = right_first + 1 + (level - k); // level-k on the right
        d.gluings.push_back({0, left_edge, 0, right_edge});
    }
    d.boundary = {{0, bottom_first_edge + level},
                  {0, right_first},
                  {0, top_first + level},
                  {0, left_first}};
    return TranslationSurface::build(d);
}

}  // namespace flatcrit
