"""Spectral-region checks: semiclassical maps, the parabolic enclosure test,
and the left-half-plane certificates.

The large-eigenvalue statement under test: all eigenvalues of large modulus
satisfy Re lambda > 0 and |Im lambda| <= C |lambda|^(1-delta) (delta = 1/25
by default), and the half-plane Re lambda < -2 ||grad q||_sup^2 holds none
at all.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .eig import EigenvalueRecord

__all__ = [
    "ParabolicRegion", "RegionReport", "RegionMapRow", "lambda_of",
    "z_h_of_lambda", "semiclassical_region_map", "parabola_check",
    "left_halfplane_bound", "certify_section5", "verification_scan",
]

DEFAULT_DELTA = 1.0 / 25.0


@dataclass(frozen=True)
class ParabolicRegion:
    """Membership: Re lambda > 0 and |Im lambda| <= C |lambda|^(1-delta),
    applied only to eigenvalues with |lambda| > C."""

    C: float
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        if not self.C > 1.0:
            raise ValueError("region constant C must exceed 1")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")

    def contains(self, lam):
        lam = complex(lam)
        return lam.real > 0.0 and abs(lam.imag) <= self.C * abs(lam) ** (1.0 - self.delta)


@dataclass
class RegionReport:
    """Verdicts of the parabola test and the left half-plane bound."""

    tested: int
    violations: list[EigenvalueRecord]
    fitted_C: float
    delta_used: float
    left_bound: float
    left_violations: list[EigenvalueRecord]
    cutoff: float

    def to_dict(self):
        return {
            "tested": self.tested,
            "violations": [r.to_dict() for r in self.violations],
            "fitted_C": self.fitted_C,
            "delta_used": self.delta_used,
            "left_bound": self.left_bound,
            "left_violations": [r.to_dict() for r in self.left_violations],
            "cutoff": self.cutoff,
        }


def lambda_of(z, h):
    """Spectral parameter lambda = z / h^2."""
    if h == 0.0:
        raise ZeroDivisionError("h must be positive")
    return complex(z) / (h * h)


def z_h_of_lambda(lam):
    """Inverse pair (z, h) normalized to |z| = 1, so h = |lambda|^(-1/2)."""
    lam = complex(lam)
    if lam == 0.0:
        raise ValueError("lambda must be nonzero")
    h = abs(lam) ** -0.5
    return lam * h * h, h


@dataclass(frozen=True)
class RegionMapRow:
    h: float
    im_z: float
    im_lambda: float
    bound: float        # |lambda|^(1 - delta/4)
    margin: float       # im_lambda - bound


def semiclassical_region_map(delta, h_list=None, im_z_factors=(1.0, 2.0, 4.0)):
    """Tabulate the implication {|z| = 1, Im z >= h^(delta/2)} implies
    {Im lambda >= |lambda|^(1-delta/4)} for each h.

    At the region edge Im z = h^(delta/2) the two sides coincide exactly;
    larger Im z gives strictly positive margins.
    """
    if not 0.0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 1/2)")
    if h_list is None:
        h_list = [2.0 ** (-j) for j in range(4, 13)]
    rows = []
    for h in h_list:
        for factor in im_z_factors:
            im_z = min(factor * h ** (delta / 2.0), 1.0)
            re_z = np.sqrt(max(1.0 - im_z ** 2, 0.0))
            lam = lambda_of(complex(re_z, im_z), h)
            bound = abs(lam) ** (1.0 - delta / 4.0)
            rows.append(RegionMapRow(float(h), float(im_z), float(lam.imag),
                                     float(bound),
                                     float(lam.imag - bound)))
    return rows


def parabola_check(records, region, left_bound=None, cutoff=None):
    """Flag stable records of modulus above the cutoff that leave the
    parabolic region; fit the smallest admissible constant.

    ``left_bound`` (when given) also flags stable records with
    Re lambda < left_bound.
    """
    if cutoff is None:
        cutoff = region.C
    stable = [r for r in records if r.stable]
    tested = [r for r in stable if abs(r.lam) > region.C]
    violations = [r for r in tested if not region.contains(r.lam)]
    fitted = 0.0
    for r in stable:
        if abs(r.lam) > cutoff:
            fitted = max(fitted,
                         abs(r.lam.imag) / abs(r.lam) ** (1.0 - region.delta))
    left_violations = []
    lb = 0.0 if left_bound is None else float(left_bound)
    if left_bound is not None:
        left_violations = [r for r in stable if r.lam.real < lb]
    return RegionReport(len(tested), violations, float(fitted), region.delta,
                        lb, left_violations, float(cutoff))


def left_halfplane_bound(profile):
    """-2 ||grad q||_sup^2: no eigenvalue may lie left of this abscissa."""
    g = profile.grad_q_sup
    return -2.0 * g * g


def certify_section5(p, lam, margin=1e-9, profile=None):
    """Certificate that lambda cannot be a discrete pencil eigenvalue.

    Preconditions: Re lambda <= -2||grad q||^2 - margin (with the gradient
    bound taken from ``profile`` when given, zero otherwise) and
    |Re lambda| >= 2 |Im lambda|.  Returns True when the Hermitian part of
    A - lambda B + lambda^2 C is positive semidefinite, i.e. when
    Re x*T(lam)x >= 0 for every x.
    """
    lam = complex(lam)
    bound = left_halfplane_bound(profile) if profile is not None else 0.0
    if lam.real > bound - margin:
        raise ValueError("certificate requires Re lambda below the gradient "
                         "bound minus the margin")
    if abs(lam.real) < 2.0 * abs(lam.imag):
        raise ValueError("certificate requires |Re lambda| >= 2 |Im lambda|")
    herm = p.A - lam.real * p.B + (lam.real ** 2 - lam.imag ** 2) * p.C
    smallest = float(np.min(np.linalg.eigvalsh(0.5 * (herm + herm.conj().T))))
    return smallest >= 0.0


def verification_scan(p, profile, records=None, region=None, seed=12345,
                      n_identity=100, grid_shape=(10, 10)):
    """Region verification used by the command-line front end: the real-part
    identity on random samples, the certificate grid left of the bound, the
    parabola test, and the left-bound test on stable records."""
    from .pencil import realpart_identity_check
    from .symbols import Violation

    rng = np.random.default_rng(seed)
    violations = []

    norm_scale = sum(float(np.linalg.norm(m, 2)) for m in (p.A, p.B, p.C))
    for _ in range(n_identity):
        x = rng.normal(size=p.N) + 1j * rng.normal(size=p.N)
        lam = complex(-rng.uniform(0.5, 20.0), rng.uniform(-5.0, 5.0))
        resid = realpart_identity_check(p, lam, x)
        scale = norm_scale * (1.0 + abs(lam)) ** 2 * float(np.linalg.norm(x)) ** 2
        if resid > 1e-12 * scale:
            violations.append(Violation("realpart_identity",
                                        {"lam_re": lam.real, "lam_im": lam.imag},
                                        resid / scale, 1e-12))

    bound = left_halfplane_bound(profile)
    re_grid = np.linspace(bound - 1.0, bound - 30.0, grid_shape[0])
    for re in re_grid:
        for im in np.linspace(-abs(re) / 10.0, abs(re) / 10.0, grid_shape[1]):
            if not certify_section5(p, complex(re, im), margin=0.5,
                                    profile=profile):
                violations.append(Violation("section5_certificate",
                                            {"lam_re": float(re),
                                             "lam_im": float(im)}, 0.0, 0.0))

    report = None
    if records is not None:
        if region is None:
            region = ParabolicRegion(10.0, DEFAULT_DELTA)
        report = parabola_check(records, region, left_bound=bound)
        for r in report.violations:
            violations.append(Violation("parabola",
                                        {"lam_re": r.lam.real,
                                         "lam_im": r.lam.imag},
                                        abs(r.lam.imag), region.C))
        for r in report.left_violations:
            violations.append(Violation("left_halfplane",
                                        {"lam_re": r.lam.real,
                                         "lam_im": r.lam.imag},
                                        r.lam.real, bound))
    return violations, report
