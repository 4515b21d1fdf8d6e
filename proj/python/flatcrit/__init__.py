"""Translation-surface ergodicity criteria toolkit."""

from ._flatcrit import (  # noqa: F401
    FlatcritError,
    Surface,
    birkhoff_strip_average,
    enumerate_connections,
    escape_mass,
    first_return_iet,
    hyp_distance,
    law_of_sines_bound,
    shortest_connection,
    systole_envelope,
    thickness_criterion,
    trace,
    verify_certificate,
)

__all__ = [
    "FlatcritError",
    "Surface",
    "birkhoff_strip_average",
    "enumerate_connections",
    "escape_mass",
    "first_return_iet",
    "hyp_distance",
    "law_of_sines_bound",
    "shortest_connection",
    "systole_envelope",
    "thickness_criterion",
    "trace",
    "verify_certificate",
]
