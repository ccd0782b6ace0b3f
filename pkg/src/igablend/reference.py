"""Published reference values used by ``--verify`` and the acceptance suite.

Dispersion coefficients follow mu h = L + sum c_n L^n; rule names are the
CLI names relative to p.
"""
from fractions import Fraction as F
from math import factorial

# (p, rule) -> {power: coefficient}, signed
DISPERSION = {
    (2, "g+1"): {5: F(-1, 1440), 7: F(-1, 6720)},
    (2, "gl+1"): {5: F(1, 2880), 7: F(-1, 16128)},
    (2, "g+0"): {5: F(-1, 720), 7: F(-5, 24192)},
    (2, "opt"): {7: F(-11, 120960), 9: F(-1, 345600)},
    (3, "g+1"): {7: F(-1, 60480), 9: F(-1, 907200)},
    (3, "gl+1"): {7: F(-1, 100800), 9: F(-11, 1814400)},
    (3, "g+0"): {7: F(-13, 604800), 9: F(-37, 7257600)},
    (3, "opt"): {9: F(-1, 145152), 11: F(19, 68428800)},
}

# leading-coefficient magnitudes for p = 4..7
TABLE1 = {
    (4, "g+1"): F(3, 20 * factorial(9)),
    (4, "gl+1"): F(79, 560 * factorial(9)),
    (4, "g+0"): F(11, 70 * factorial(9)),
    (4, "opt"): F(317, 24 * factorial(11)),
    (5, "g+1"): F(5, 12 * factorial(11)),
    (5, "gl+1"): F(29, 70 * factorial(11)),
    (5, "g+0"): F(211, 504 * factorial(11)),
    (5, "opt"): F(35039, 420 * factorial(13)),
    (6, "g+1"): F(691, 420 * factorial(13)),
    (6, "gl+1"): F(91177, 55440 * factorial(13)),
    (6, "g+0"): F(5069, 3080 * factorial(13)),
    (6, "opt"): F(15479, 24 * factorial(15)),
    (7, "g+1"): F(35, 4 * factorial(15)),
    (7, "gl+1"): F(105103, 12012 * factorial(15)),
    (7, "g+0"): F(60061, 6864 * factorial(15)),
    (7, "opt"): F(91067, 15 * factorial(17)),
}

# spectrum series sqrt(lam_h) h = L + c L^{2p+1} + ...
SPECTRUM = {
    (2, "g+1"): {5: F(1, 1440)},
    (2, "gl+1"): {5: F(-1, 2880)},
}

# optimal weight tau on the first rule of each pair
TAU = {
    (2, "G3", "GL3"): F(1, 3),
    (2, "G3", "G2"): F(2),
    (2, "GL3", "G2"): F(4, 5),
    (3, "G4", "GL4"): F(-3, 2),
    (3, "G4", "G3"): F(13, 3),
    (3, "GL4", "G3"): F(13, 7),
    (4, "G5", "GL5"): F(-79, 5),
    (4, "G5", "G4"): F(22),
    (5, "G6", "GL6"): F(-174),
    (5, "G6", "G5"): F(211),
    (6, "G7", "GL7"): F(-91177, 35),
    (6, "G7", "G6"): F(30414, 10),
    (7, "G8", "GL8"): F(-105103, 2),
    (7, "G8", "G7"): F(60061),
}

OPTIMAL_MASS = {2: {"alpha": F(7, 720), "beta": F(19, 90)}}

# three-rule O_3 blends: (weight, rule name)
O3_ALTERNATIVES = (
    ((F(4, 35), "GL3"), (F(36, 35), "G2"), (F(-1, 7), "GL2")),
    ((F(10, 49), "G3"), (F(234, 245), "G2"), (F(-39, 245), "GL2")),
    ((F(20, 7), "G3"), (F(-52, 35), "GL3"), (F(-13, 35), "GL2")),
    ((F(10, 7), "GL4"), (F(-12, 35), "GL3"), (F(-3, 35), "GL2")),
)

# H1-seminorm errors of u_3, p = 2
TABLE2_NS = (20, 40, 80, 160, 320)
TABLE2 = {
    "opt": (8.007409e-02, 1.962886e-02, 4.882983e-03, 1.219233e-03, 3.047138e-04),
    "g+1": (8.007620e-02, 1.962889e-02, 4.882983e-03, 1.219233e-03, 3.047138e-04),
    "gl+1": (8.007355e-02, 1.962885e-02, 4.882983e-03, 1.219233e-03, 3.047138e-04),
    "g+0": (8.007966e-02, 1.962894e-02, 4.882984e-03, 1.219233e-03, 3.047138e-04),
}
TABLE2_ORDER = 2.01

# effectivity indices, (p, mode) -> values at N = 5, 10, 20, 40 and fitted order
TABLE3_NS = (5, 10, 20, 40)
TABLE3 = {
    (1, 1): ((1.00119, 1.00040, 1.00011, 1.00003), 1.83),
    (1, 4): ((0.88632, 1.00127, 1.00192, 1.00057), 2.28),
    (2, 1): ((0.96997, 0.99231, 0.99806, 0.99952), 1.96),
    (2, 4): ((0.67227, 0.89264, 0.97046, 0.99242), 1.82),
    (3, 1): ((0.92794, 0.97974, 0.99468, 1.00223), 1.7),
    (3, 4): ((0.64385, 0.75699, 0.92242, 0.97899), 1.39),
}


def published_dispersion(p, rule):
    """Known coefficients {power: value} for (p, rule), signed where published."""
    if (p, rule) in DISPERSION:
        return dict(DISPERSION[(p, rule)])
    if (p, rule) in TABLE1:
        power = 2 * p + 3 if rule == "opt" else 2 * p + 1
        return {power: -TABLE1[(p, rule)]}
    return {}
