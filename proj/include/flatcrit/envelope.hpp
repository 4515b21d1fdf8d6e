#pragma once

#include "flatcrit/surface.hpp"

#include <optional>

namespace flatcrit {

/// One piece of the lower envelope of squared connection lengths along the
/// geodesic deformation: delta'^2(t) = b e^{-2t} + a e^{2t} on [t0, t1],
/// where (sqrt(b), sqrt(a)) are the witness's |horizontal|, |vertical|
/// components at t = 0 (after the optional pre-deformation).
struct EnvelopePiece {
    double t0 = 0, t1 = 0;
    double a = 0, b = 0;
    Vec2q holonomy;  // exact witness, base frame
    int start_class = -1, end_class = -1;

    double value(double t) const { return b * std::exp(-2 * t) + a * std::exp(2 * t); }
};

struct SystoleEnvelope {
    double horizon = 0;
    std::vector<EnvelopePiece> pieces;

    double value(double t) const;        // delta'^2(t)
    double delta_prime(double t) const { return std::sqrt(value(t)); }
    double d_prime(double t) const { return -std::log(delta_prime(t)); }
    double min_value() const;            // min over [0, horizon] of delta'^2
    double max_value() const;
};

/// Exact lower envelope of f_v(t) over a provably sufficient finite candidate
/// set: windowed enumeration iterated to a fixpoint, then certified by the
/// doubling test (enlarging every window's bounds leaves the envelope
/// unchanged). `pre` post-composes the charts before the geodesic flow
/// (approximate kind; rotations select the flow direction).
SystoleEnvelope systole_envelope(const TranslationSurface& s, double horizon,
                                 const Mat2d* pre = nullptr);

/// Envelope for the flow in an exact direction: the frame is rotated so the
/// direction is horizontal, with the near-direction components resolved in
/// exact arithmetic (reliable at horizons where a rounded rotation would
/// drift into its own rational approximations).
SystoleEnvelope systole_envelope_direction(const TranslationSurface& s, double horizon,
                                           const Vec2q& direction);

std::string envelope_to_csv(const SystoleEnvelope& env, int samples);

}  // namespace flatcrit
