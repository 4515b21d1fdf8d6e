"""Python smoke tests for the _flatcrit extension module."""
import math
import os
import sys

import _flatcrit as fc

FIXTURES = os.environ.get("FLATCRIT_FIXTURES", "tests/fixtures")


def check(cond, what):
    if not cond:
        print("FAIL:", what)
        sys.exit(1)
    print("ok:", what)


torus = fc.Surface.torus()
check(torus.validate() == [], "torus validates")
check(torus.area() == 1.0, "torus area")

octagon = fc.Surface.regular_octagon()
check(octagon.area_exact() == "2 + 2*sqrt(2)", "octagon exact area")
check(octagon.cone_angles() == [(3, False)], "octagon cone angle 6pi")

back = fc.Surface.from_text(torus.to_text())
check(back.area() == 1.0, "surface text round-trip")

conns = fc.enumerate_connections(torus, 1.5)
check(len(conns) == 8, "eight short torus connections")

env = fc.systole_envelope(torus, 5.0)
check(abs(env["criterion_integral"] - (1 - math.exp(-10)) / 2) < 1e-9,
      "criterion integral closed form")

phi = "1/2 + 1/2*sqrt(5)"
golden = fc.systole_envelope(torus, 12.0, "1", phi)
check(golden["min_delta_prime"] >= 0.8, "golden envelope bounded below")
check(golden["cheung_eskin_C"] <= 0.25, "cheung-eskin constant small")

lengths, perm = fc.first_return_iet(torus, 0, 0, "1", phi, 50.0)
check(abs(lengths[0] - 0.38196601125) < 1e-9 and perm == [1, 0], "golden IET")

check(abs(fc.hyp_distance([1, 0, 0, 1], [0.5, 0, 0, 2.0]) - math.log(2)) < 1e-12,
      "hyperbolic normalization")
check(abs(fc.law_of_sines_bound(0.1, 1.0) - math.sinh(0.2) / math.sinh(2.0)) < 1e-15,
      "law of sines bound")

cert_text = open(os.path.join(FIXTURES, "torus-shear.cert")).read()
res = fc.verify_certificate(torus, cert_text)
check(res["pass"], "torus shear certificate verifies")

status, length = fc.trace(torus, 0, "1/2", "1/2", "1", "1", 10.0)
check(status == "hitSingularity" and abs(length - math.sqrt(2) / 2) < 1e-12,
      "diagonal hits the corner")

cham = fc.Surface.chamanara(4)
check(cham.has_boundary() and cham.area() == 1.0, "chamanara truncation")
frac = fc.escape_mass(cham, "1", "1", 20.0, 100, 7)
check(0.0 <= frac <= 8 * 2 ** -4 + 0.1, "escape fraction in range")

avgs, disp = fc.birkhoff_strip_average(torus, "1", phi, 0.0, 0.5, 500.0, 4, 11)
check(all(abs(a - 0.5) < 0.05 for a in avgs), "birkhoff strip averages near 1/2")

print("python smoke: all checks passed")
