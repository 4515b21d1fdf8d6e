#pragma once

#include "flatcrit/surface.hpp"

#include <optional>

namespace flatcrit {

/// Distance between A*i and B*i in the upper half-plane with the curvature -4
/// normalization (half the standard hyperbolic distance), under which
/// dist(I, g_t) = |t|. Throws on non-unit determinants.
double hyp_distance(const Mat2d& a, const Mat2d& b);

/// sinh(2 eps) / sinh(2 t), clamped to [0, 1]; the angle bound of the
/// law-of-sines estimate in the curvature -4 disk.
double law_of_sines_bound(double epsilon, double t);

struct RecurrenceSample {
    double t = 0;
    double epsilon = 0;              // distance to the best word found (upper bound)
    std::vector<int> best_word;      // generator indices, negative = inverse
};

/// For each time, the distance from g_t to the word ball of the generated
/// group: reduced words up to word_bound over generators and inverses, in
/// canonical (length, lexicographic) order; deterministic minimizer.
std::vector<RecurrenceSample> recurrence_profile(const std::vector<Mat2d>& generators,
                                                 const std::vector<double>& times,
                                                 int word_bound);

/// Smallest s > 0 with a word equal to diag(e^-s, e^s) up to tol on the
/// off-diagonals; empty when the ball has no such element.
std::optional<double> is_periodic(const std::vector<Mat2d>& generators, int word_bound,
                                  double tol = 1e-10);
/// Exact kind: off-diagonals must vanish exactly.
std::optional<double> is_periodic_exact(const std::vector<Mat2q>& generators, int word_bound);

std::string recurrence_to_csv(const std::vector<RecurrenceSample>& samples);

// --- affine automorphism certificates -------------------------------------

/// A cut-and-translate correspondence witnessing M in SL(S, alpha): the
/// pieces tile apply_matrix(s, M) and their shifted images tile s.
struct CertPiece {
    int src_poly = 0;             // polygon of apply_matrix(s, M)
    std::vector<Vec2q> verts;     // CCW, convex
    Vec2q shift;                  // translation into the target polygon of s
    int dst_poly = 0;
};

struct AutomorphismCertificate {
    Mat2q matrix;
    std::vector<CertPiece> pieces;
};

struct CertReport {
    std::vector<std::string> failures;
    std::vector<std::string> truncated;  // constraints through marked boundary
    bool pass() const { return failures.empty(); }
};

/// Exact verification: (a) det M = 1; (b) pieces tile apply_matrix(s, M);
/// (c) shifted pieces tile s; (d) every piece interface is compatible with
/// the gluings on both sides. Interfaces that would cross marked boundary
/// are reported as truncated, not failed.
CertReport verify_affine_automorphism(const TranslationSurface& s,
                                      const AutomorphismCertificate& cert);

/// Search for a correspondence by developing the overlay of apply_matrix(s, M)
/// over s from vertex-to-vertex seeds; returns the first certificate that
/// verifies. Throws when no seed works.
AutomorphismCertificate generate_certificate(const TranslationSurface& s, const Mat2q& m);

AutomorphismCertificate parse_certificate(const std::string& text, const TranslationSurface& s);
std::string write_certificate(const AutomorphismCertificate& cert, const TranslationSurface& s);

}  // namespace flatcrit
