"""Interior parametrix recursion in one space dimension, at symbol level.

The rescaled operator has full symbol t = t0 + h*t1 with

    t0 = q(x)*(xi^2 - z)^2 + z*(z - xi^2)
    h*t1 = (xi^2 - z) * (-2i*h*xi*q'(x) - h^2*q''(x)),

derived by applying the rescaled operator to a plane wave e^{i x xi / h}.
Symbols are manipulated as pointwise derivative jets: a jet maps a pair of
orders (a, b) to the exact value of d^a/dx^a d^b/dxi^b at a fixed point.
Products and reciprocals follow the Leibniz recursion, so the recursion

    r0 = 1/t0,   r1 = -(1/h) * (1/t0) * c0,
    c0 = h*t1*r0 + sum_{k=1..4} h^k/(i^k k!) (d_xi^k t)(d_x^k r0)

is evaluated exactly (no finite differences).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, factorial

import numpy as np

from .profiles import RefractiveProfile

__all__ = [
    "SymbolField1D", "Jet", "jet_const", "jet_sum", "jet_scale", "jet_prod",
    "jet_recip", "jet_shift", "t0_jet", "t_jet", "r0_jet", "c0_jet", "r1_jet",
    "full_symbol", "r0_derivatives", "c0_symbol", "r1_symbol",
    "compose_truncated", "parametrix_residual_scan", "ResidualScan",
]

_QDERIV_ORDER = 12   # d_x^4 of c0 consumes q-derivatives through order 8


@dataclass(frozen=True)
class SymbolField1D:
    """A pointwise symbol evaluation site with profile-supplied q-jets."""

    profile: RefractiveProfile
    x: float
    xi: float
    z: complex
    h: float
    delta: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.h < 1.0:
            raise ValueError("h must lie in (0, 1)")
        if not 0.0 <= self.delta < 0.5:
            raise ValueError("delta must lie in [0, 1/2)")
        if not complex(self.z).imag > 0.0:
            raise ValueError("Im z must be positive")

    def q_jet(self):
        return [complex(v) for v in self.profile.q_derivs(self.x, _QDERIV_ORDER)]


class Jet:
    """Memoized map (a, b) -> d_x^a d_xi^b value at a fixed point."""

    __slots__ = ("fn", "_memo")

    def __init__(self, fn):
        self.fn = fn
        self._memo = {}

    def d(self, a, b):
        key = (a, b)
        if key not in self._memo:
            self._memo[key] = self.fn(a, b)
        return self._memo[key]


def jet_const(c):
    return Jet(lambda a, b: c if (a, b) == (0, 0) else 0.0)


def jet_sum(*terms):
    return Jet(lambda a, b: sum(t.d(a, b) for t in terms))


def jet_scale(c, jet):
    return Jet(lambda a, b: c * jet.d(a, b))


def jet_prod(F, G):
    def fn(a, b):
        return sum(comb(a, j) * comb(b, k) * F.d(j, k) * G.d(a - j, b - k)
                   for j in range(a + 1) for k in range(b + 1))
    return Jet(fn)


def jet_recip(F):
    """Jet of 1/F via the Leibniz recursion on F * (1/F) = 1."""
    out = Jet(None)

    def fn(a, b):
        f00 = F.d(0, 0)
        if (a, b) == (0, 0):
            return 1.0 / f00
        acc = 0.0
        for j in range(a + 1):
            for k in range(b + 1):
                if (j, k) == (0, 0):
                    continue
                acc += comb(a, j) * comb(b, k) * F.d(j, k) * out.d(a - j, b - k)
        return -acc / f00
    out.fn = fn
    return out


def jet_shift(F, dx, dxi):
    return Jet(lambda a, b: F.d(a + dx, b + dxi))


def t0_jet(f):
    """Closed-form jet of the leading symbol t0 at the field point."""
    qd = f.q_jet()
    xi, z = complex(f.xi), complex(f.z)

    def w_deriv(b):  # d_xi^b (xi^2 - z)^2
        return {0: (xi * xi - z) ** 2, 1: 4.0 * xi ** 3 - 4.0 * z * xi,
                2: 12.0 * xi * xi - 4.0 * z, 3: 24.0 * xi, 4: 24.0}.get(b, 0.0)

    def v_deriv(b):  # d_xi^b z*(z - xi^2)
        return {0: z * z - z * xi * xi, 1: -2.0 * z * xi, 2: -2.0 * z}.get(b, 0.0)

    def fn(a, b):
        if a == 0:
            return qd[0] * w_deriv(b) + v_deriv(b)
        return (qd[a] if a < len(qd) else 0.0) * w_deriv(b)
    return Jet(fn)


def t_jet(f):
    """Jet of the full symbol t = t0 + h*t1."""
    base = t0_jet(f)
    t1 = t1_jet(f)
    h = f.h
    return Jet(lambda a, b: base.d(a, b) + h * t1.d(a, b))


def t1_jet(f):
    """Jet of t1 = (t - t0)/h = (xi^2 - z)(-2i xi q') - h (xi^2 - z) q''."""
    qd = f.q_jet()
    xi, z, h = complex(f.xi), complex(f.z), f.h

    def u_deriv(b):  # d_xi^b (xi^3 - z*xi)
        return {0: xi ** 3 - z * xi, 1: 3.0 * xi * xi - z,
                2: 6.0 * xi, 3: 6.0}.get(b, 0.0)

    def p_deriv(b):  # d_xi^b (xi^2 - z)
        return {0: xi * xi - z, 1: 2.0 * xi, 2: 2.0}.get(b, 0.0)

    def fn(a, b):
        q1 = qd[a + 1] if a + 1 < len(qd) else 0.0
        q2 = qd[a + 2] if a + 2 < len(qd) else 0.0
        return -2.0j * u_deriv(b) * q1 - h * p_deriv(b) * q2
    return Jet(fn)


def r0_jet(f):
    return jet_recip(t0_jet(f))


def c0_jet(f):
    """Jet of the first remainder c0 = h t1 r0 + sum_k h^k/(i^k k!)
    (d_xi^k t)(d_x^k r0); the sum stops at k=4 because t is quartic in xi."""
    t = t_jet(f)
    r0 = r0_jet(f)
    terms = [jet_scale(f.h, jet_prod(t1_jet(f), r0))]
    for k in range(1, 5):
        coef = f.h ** k / (1j ** k * factorial(k))
        terms.append(jet_scale(coef, jet_prod(jet_shift(t, 0, k),
                                              jet_shift(r0, k, 0))))
    return jet_sum(*terms)


def r1_jet(f):
    return jet_scale(-1.0 / f.h, jet_prod(jet_recip(t0_jet(f)), c0_jet(f)))


# -- public pointwise operations -----------------------------------------

def full_symbol(f):
    """Value of the full symbol t at the field point; equals the plane-wave
    conjugation of the rescaled operator exactly."""
    return t_jet(f).d(0, 0)


def r0_derivatives(f, a, b):
    """Exact d_x^a d_xi^b of 1/t0 at the field point."""
    if abs(t0_jet(f).d(0, 0)) == 0.0:
        raise ZeroDivisionError("t0 vanishes at the evaluation point")
    return r0_jet(f).d(a, b)


def c0_symbol(f):
    return c0_jet(f).d(0, 0)


def r1_symbol(f):
    return r1_jet(f).d(0, 0)


def compose_truncated(symbol_a, symbol_b, order, h):
    """Truncated composition sum_{k<=order} h^k/k! (d_xi^k a)(D_x^k b) of two
    jets at a common point, with D_x = -i d_x."""
    total = 0.0 + 0.0j
    for k in range(order + 1):
        total += (h ** k / factorial(k)) * symbol_a.d(0, k) \
            * (-1j) ** k * symbol_b.d(k, 0)
    return total


@dataclass(frozen=True)
class ResidualScan:
    """Log-log fit of the parametrix residual against h."""

    order: int               # N of the truncated parametrix
    delta: float
    h_list: tuple
    residuals: tuple
    slope: float
    threshold: float         # (N+1)(1 - 2 delta) - 0.2
    passed: bool


def parametrix_residual_scan(profile, points, delta, N, h_list):
    """Max symbol-level residual |t # r^(N) - 1| over the point set for each
    h with Im z = h^(delta/2), and the fitted log-log slope.

    ``points`` is a sequence of (x, xi, re_z) triples.
    """
    if N not in (0, 1):
        raise ValueError("truncation order N must be 0 or 1")
    if len(h_list) < 3:
        raise ValueError("need at least 3 h-values for a slope fit")
    residuals = []
    for h in h_list:
        im_z = h ** (delta / 2.0)
        worst = 0.0
        for x, xi, re_z in points:
            f = SymbolField1D(profile, float(x), float(xi),
                              complex(re_z, im_z), float(h), float(delta))
            t = t_jet(f)
            rN = r0_jet(f)
            if N == 1:
                rN = jet_sum(rN, jet_scale(f.h, r1_jet(f)))
            val = compose_truncated(t, rN, 4 * (N + 1), h)
            worst = max(worst, abs(val - 1.0))
        residuals.append(worst)
    floor = 1e-15
    if max(residuals) <= floor:
        # constant-profile case: residual identically at rounding level
        slope = float("inf")
    else:
        slope = float(np.polyfit(np.log(np.asarray(h_list)),
                                 np.log(np.maximum(residuals, 1e-300)), 1)[0])
    threshold = (N + 1) * (1.0 - 2.0 * delta) - 0.2
    return ResidualScan(N, delta, tuple(float(h) for h in h_list),
                        tuple(residuals), slope, threshold,
                        slope >= threshold)


DEFAULT_SCAN_POINTS = tuple(
    (x, xi, re_z)
    for x in (0.0, 0.25, 0.55)
    for xi in (0.0, 0.8, 1.4)
    for re_z in (-1.0, 0.4, 1.0)
)


def verification_scan(profile, delta=0.02, h_list=None,
                      points=DEFAULT_SCAN_POINTS, slope_n0=0.8, slope_n1=1.5,
                      const_residual_cap=1e-13):
    """Residual-decay verification used by the command-line front end.

    Returns (violations, details) where details carries the two fitted scans
    and the constant-profile residual maximum.
    """
    from .symbols import Violation

    if h_list is None:
        h_list = [2.0 ** (-j) for j in range(4, 13)]
    violations = []
    scans = {}
    for N, floor in ((0, slope_n0), (1, slope_n1)):
        scan = parametrix_residual_scan(profile, points, delta, N, h_list)
        scans[N] = scan
        if scan.slope < floor:
            violations.append(Violation(
                f"residual_slope_N{N}", {"delta": delta}, scan.slope, floor))

    const = RefractiveProfile.constant(2.0, domain=profile.domain)
    worst = 0.0
    for h in h_list:
        im_z = h ** (delta / 2.0)
        for x, xi, re_z in points:
            f = SymbolField1D(const, float(x), float(xi),
                              complex(re_z, im_z), float(h), delta)
            val = compose_truncated(t_jet(f), r0_jet(f), 4, h)
            worst = max(worst, abs(val - 1.0))
    if worst > const_residual_cap:
        violations.append(Violation("constant_profile_residual", {}, worst,
                                    const_residual_cap))
    return violations, {"scans": scans, "constant_residual": worst}
