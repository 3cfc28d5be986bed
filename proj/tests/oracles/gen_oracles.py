"""Independent reference values, computed with mpmath at 30 digits.

Run once; the output is frozen in tests/oracle_values.hpp.
"""
import mpmath as mp

mp.mp.dps = 30
phi = lambda x: mp.npdf(x)
Phi = lambda x: mp.ncdf(x)


def q(t, x, z):
    return mp.npdf(z, x, mp.sqrt(t))


def daniels_g(d, k1, k2, s):
    return d - s / (2 * d) * mp.log(k1 / 2 + mp.sqrt(k1**2 / 4 + k2 * mp.exp(-4 * d**2 / s)))


def daniels_survival(d, k1, k2, t):
    # method of images: sub-density phi_t(y) - k1 phi_t(y - 2d) - k2 phi_t(y - 4d) below g(t)
    g = daniels_g(d, k1, k2, t)
    st = mp.sqrt(t)
    return Phi(g / st) - k1 * Phi((g - 2 * d) / st) - k2 * Phi((g - 4 * d) / st)


def daniels_density(d, k1, k2, t):
    return -mp.diff(lambda s: daniels_survival(d, k1, k2, s), t)


def linear_survival(a, b, h):
    # P(W_s < a + b s, s <= h) by integrating the bridge non-crossing probability
    f = lambda z: q(h, 0, z) * (1 - mp.exp(-2 * a * (a + b * h - z) / h))
    return mp.quad(f, [-mp.inf, a + b * h])


def gateaux_lhs(a1, a2, b1, b2):
    # derivative of linear_survival(a1 + eps a2, b1 + eps b2, 1) at eps = 0
    return mp.diff(lambda e: linear_survival(a1 + e * a2, b1 + e * b2, 1), 0)


def meander_laplace(lam):
    # E exp(lam R) with R Rayleigh
    return mp.quad(lambda y: mp.exp(lam * y) * y * mp.exp(-y * y / 2), [0, mp.inf])


out = {
    "kQ_1_0_1": q(1, 0, 1),
    "kNonCross_1_1": 1 - mp.exp(-2),
    "kMeanderLaplace1": meander_laplace(1),
    "kMeanderLaplaceNeg2": meander_laplace(-2),
    "kRayleighMean": mp.sqrt(mp.pi / 2),
    "kLinearSurvival_1_1": linear_survival(1, 1, 1),
    "kLinearSurvival_1_m1": linear_survival(1, -1, 1),
    "kLinearSurvival_0p5_0p3_h2": linear_survival(mp.mpf("0.5"), mp.mpf("0.3"), 2),
    "kGateauxSetA": gateaux_lhs(1, 1, 1, 1),
    "kGateauxSetB": gateaux_lhs(1, mp.mpf("-0.5"), -1, 2),
    "kDanielsG1": daniels_g(mp.mpf("0.5"), mp.mpf("0.5"), mp.mpf("0.5"), 1),
    "kDanielsDensity1": daniels_density(mp.mpf("0.5"), mp.mpf("0.5"), mp.mpf("0.5"), 1),
    "kDanielsDensity0p3": daniels_density(mp.mpf("0.5"), mp.mpf("0.5"), mp.mpf("0.5"), mp.mpf("0.3")),
}
g1 = out["kDanielsG1"]
out["kDanielsF1"] = 2 * out["kDanielsDensity1"] / q(1, 0, g1)

print("#pragma once\n")
print("// Generated by tests/oracles/gen_oracles.py (mpmath, 30 digits).\n")
print("namespace oracle {\n")
for k, v in out.items():
    print(f"inline constexpr double {k} = {mp.nstr(v, 20)};")
print("\n}  // namespace oracle")
