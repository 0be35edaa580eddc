"""Analytic location of transmission eigenvalues for constant index.

Dispersion functions whose zeros in the frequency k are the exact
transmission eigenvalues (lambda = k^2) for constant perturbation on an
interval and a disk, and an argument-principle root finder that isolates
their complex zeros by recursive winding-number subdivision with Newton
polishing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _dd
from .pencil import DiskMode, Interval
from .symbols import Rectangle

__all__ = [
    "DispersionProblem", "LocatedZero", "BesselDomainError", "WindingError",
    "MaxDepthError", "bessel_j", "bessel_j_deriv", "interval_dispersion",
    "disk_dispersion", "dispersion_function", "find_zeros_rectangle",
    "real_zeros_bisection", "oracle_eigenvalues",
]

BESSEL_DOMAIN = 40.0


class BesselDomainError(ValueError):
    """Argument outside the validated series domain |zeta| <= 40."""


class WindingError(RuntimeError):
    """Non-integer winding number after the refinement cap."""


class MaxDepthError(RuntimeError):
    """Subdivision depth exhausted before all zeros were isolated."""

    def __init__(self, rect):
        self.rect = rect
        super().__init__(f"maxdepth exceeded on cell {rect}; refine the search")


@dataclass(frozen=True)
class DispersionProblem:
    """Model domain plus index of refraction n > 1 (n^2 = 1 + m)."""

    domain: Interval | DiskMode
    n: float

    def __post_init__(self):
        if not self.n > 1.0:
            raise ValueError("index must satisfy n > 1")


# -- Bessel J by compensated power series ----------------------------------

def bessel_j(order, zeta):
    """J_order(zeta) by the alternating power series

        sum_m (-1)^m (zeta/2)^(order+2m) / (m! (m+order)!),

    accumulated in double-double arithmetic; terms are added until they fall
    below 1e-18 of the running magnitude scale.  Valid for |zeta| <= 40
    (relative accuracy 1e-10); larger arguments raise.
    """
    if order < 0 or int(order) != order:
        raise ValueError("order must be a nonnegative integer")
    zeta = np.asarray(zeta, dtype=complex)
    scalar = zeta.ndim == 0
    zeta = np.atleast_1d(zeta)
    if np.any(np.abs(zeta) > BESSEL_DOMAIN):
        raise BesselDomainError(
            f"|zeta| exceeds the validated series domain {BESSEL_DOMAIN}")

    half = _dd.ddc(zeta / 2.0)
    term = _dd.ddc(np.ones_like(zeta))
    for j in range(1, order + 1):
        term = _dd.ddc_mul(term, half)
        if j >= 2:
            term = _dd.ddc_div_d(term, float(j))
    w = _dd.ddc_mul(half, half)
    total = term
    runmax = _dd.ddc_mag(term)
    for m in range(400):
        term = _dd.ddc_mul(term, w)
        term = _dd.ddc_div_d(term, -((m + 1.0) * (m + order + 1.0)))
        total = _dd.ddc_add(total, term)
        mag = _dd.ddc_mag(term)
        runmax = np.maximum(runmax, mag)
        # the spec's running-max cutoff alone leaves too large a tail near
        # the domain edge; the sum-magnitude floor restores 1e-10 accuracy
        scale = np.maximum(_dd.ddc_mag(total), 1e-13 * runmax)
        if np.all(mag <= 1e-18 * scale):
            break
    out = _dd.ddc_value(total)
    return out[0] if scalar else out


def bessel_j_deriv(order, zeta):
    """J_order'(zeta) via J_0' = -J_1 and J_l' = (J_{l-1} - J_{l+1})/2."""
    if order == 0:
        return -bessel_j(1, zeta)
    return 0.5 * (bessel_j(order - 1, zeta) - bessel_j(order + 1, zeta))


# -- dispersion determinants ------------------------------------------------

def interval_dispersion(k, prob):
    """4x4 boundary determinant for the interval of length L.

    Columns are {cos kx, sin kx, -cos nkx, -sin nkx}; rows are value and
    derivative of the solution difference at both endpoints.  Zeros in k are
    transmission eigenvalues lambda = k^2.
    """
    L = prob.domain.b - prob.domain.a
    n = prob.n
    k = np.asarray(k, dtype=complex)
    scalar = k.ndim == 0
    k = np.atleast_1d(k)
    if np.any(k == 0.0):
        raise ValueError("k = 0 degenerates the fundamental system")
    c1, s1 = np.cos(k * L), np.sin(k * L)
    c2, s2 = np.cos(n * k * L), np.sin(n * k * L)
    one = np.ones_like(k)
    zero = np.zeros_like(k)
    rows = [
        [one, zero, -one, zero],
        [zero, k, zero, -n * k],
        [c1, s1, -c2, -s2],
        [-k * s1, k * c1, n * k * s2, -n * k * c2],
    ]
    mat = np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)
    det = np.linalg.det(mat)
    return det[0] if scalar else det


def disk_dispersion(k, prob):
    """Wronskian-type determinant for angular mode l on the disk of radius R:

        d_l(k) = J_l(kR) n k J_l'(n k R) - k J_l'(kR) J_l(n k R).
    """
    R, l, n = prob.domain.radius, prob.domain.mode, prob.n
    k = np.asarray(k, dtype=complex)
    return (bessel_j(l, k * R) * n * k * bessel_j_deriv(l, n * k * R)
            - k * bessel_j_deriv(l, k * R) * bessel_j(l, n * k * R))


def dispersion_function(prob):
    if isinstance(prob.domain, Interval):
        return lambda k: interval_dispersion(k, prob)
    return lambda k: disk_dispersion(k, prob)


# -- argument-principle root finder ------------------------------------------

@dataclass(frozen=True)
class LocatedZero:
    """A polished zero with its winding multiplicity."""

    location: complex
    multiplicity: int
    f_abs: float
    scale: float


def _boundary_path(rect, per_edge):
    """Counterclockwise boundary samples, per_edge points per edge, closed."""
    c = rect.corners
    ts = np.arange(per_edge) / per_edge
    pts = [c[i] + (c[(i + 1) % 4] - c[i]) * ts for i in range(4)]
    path = np.concatenate(pts)
    return np.append(path, path[0])


def _windings(f, rects, start=64, max_samples=65536):
    """Winding numbers of f around several rectangle boundaries.

    All outstanding boundaries are evaluated in one batched call per round;
    the sampling of a boundary is doubled until consecutive phase increments
    stay below pi/2, and a boundary grazing a zero is deterministically
    perturbed.  Returns a list of (winding, possibly adjusted rectangle).
    """
    states = [{"rect": r, "per_edge": start, "trial": 0} for r in rects]
    results: list = [None] * len(rects)
    pending = list(range(len(rects)))
    while pending:
        paths = [_boundary_path(states[i]["rect"], states[i]["per_edge"])
                 for i in pending]
        sizes = [p.size for p in paths]
        vals = np.asarray(f(np.concatenate(paths)))
        offset = 0
        still = []
        for i, size in zip(pending, sizes):
            v = vals[offset:offset + size]
            offset += size
            st = states[i]
            absv = np.abs(v)
            bmax = float(np.max(absv))
            if np.min(absv) <= 1e-13 * max(bmax, 1e-300):
                if st["trial"] >= 8:
                    raise WindingError(
                        f"zero pinned to the boundary of {st['rect']}")
                st["rect"] = _perturbed(st["rect"], st["trial"])
                st["trial"] += 1
                still.append(i)
                continue
            dphi = np.angle(v[1:] / v[:-1])
            if np.max(np.abs(dphi)) >= 0.5 * np.pi:
                if 4 * st["per_edge"] >= max_samples:
                    raise WindingError(
                        f"phase sampling cap reached on {st['rect']}")
                st["per_edge"] *= 2
                still.append(i)
                continue
            total = float(np.sum(dphi) / (2.0 * np.pi))
            if abs(total - round(total)) > 0.05:
                raise WindingError(
                    f"non-integer winding {total:.3f} on {st['rect']}")
            results[i] = (int(round(total)), st["rect"])
        pending = still
    return results


def _perturbed(rect, trial):
    """Deterministically jiggled copy, used when a zero sits on the boundary."""
    eps = (1.0 + trial) * 1e-6 * rect.diameter
    return Rectangle(rect.re_min - eps, rect.re_max + 1.3 * eps,
                     rect.im_min - 0.7 * eps, rect.im_max + eps)


def _split(rect):
    """Split the longest side slightly off-center so that zeros straddling
    the midline (e.g. on the real axis) do not land on the cut."""
    off = 0.5137
    if rect.re_max - rect.re_min >= rect.im_max - rect.im_min:
        mid = rect.re_min + off * (rect.re_max - rect.re_min)
        return (Rectangle(rect.re_min, mid, rect.im_min, rect.im_max),
                Rectangle(mid, rect.re_max, rect.im_min, rect.im_max))
    mid = rect.im_min + off * (rect.im_max - rect.im_min)
    return (Rectangle(rect.re_min, rect.re_max, rect.im_min, mid),
            Rectangle(rect.re_min, rect.re_max, mid, rect.im_max))


def _newton_lockstep(f, cells, max_iter=80):
    """Multiplicity-aware Newton iteration run in lockstep over all cells,
    so each iteration costs one batched evaluation of f at three points per
    unconverged cell.  Entries that leave their blown-up cell or stall are
    returned as None."""
    n = len(cells)
    z = np.array([c.center for c, _ in cells], dtype=complex)
    mult = np.array([w for _, w in cells], dtype=float)
    big = [c.expand(3.0) for c, _ in cells]
    out: list = [None] * n
    alive = list(range(n))
    for _ in range(max_iter):
        if not alive:
            break
        za = z[alive]
        step = 1e-6 * (1.0 + np.abs(za))
        pts = np.concatenate([za, za + step, za - step])
        vals = np.asarray(f(pts))
        fz = vals[:len(alive)]
        dfz = (vals[len(alive):2 * len(alive)] - vals[2 * len(alive):]) \
            / (2.0 * step)
        keep = []
        for idx, i in enumerate(alive):
            if dfz[idx] == 0.0:
                continue
            dz = mult[i] * fz[idx] / dfz[idx]
            z[i] = z[i] - dz
            if not big[i].contains(z[i]):
                continue
            if abs(dz) <= 1e-12 * (1.0 + abs(z[i])):
                out[i] = complex(z[i])
            else:
                keep.append(i)
        alive = keep
    for i in alive:
        out[i] = complex(z[i])   # slow linear convergence: best value so far
    return out


def find_zeros_rectangle(f, rect, maxdepth=60, merge_tol=1e-8):
    """All zeros of the analytic function f inside the rectangle.

    The winding number is computed by adaptive boundary sampling, batched
    across all active cells of the subdivision.  Every cell of positive
    winding is first attacked by multiplicity-aware Newton polishing,
    verified by the winding of a small rectangle around the polished point;
    a cell is subdivided only when polishing fails, so clusters of
    coincident zeros are reported as one zero carrying the full winding
    multiplicity without driving the subdivision into the rounding noise
    floor.
    """
    ((w, rect),) = _windings(f, [rect], start=128)

    zeros: list[LocatedZero] = []
    sep = merge_tol * (1.0 + abs(rect.center))
    active = [(rect, w)] if w > 0 else []
    depth = 0
    while active:
        if depth > maxdepth:
            raise MaxDepthError(active[0][0])

        polished = _newton_lockstep(f, active)
        # batched residuals and boundary scales for every candidate
        cand_pts = np.array([z if z is not None else cell.center
                             for (cell, _), z in zip(active, polished)],
                            dtype=complex)
        scale_paths = [_boundary_path(cell, 16) for cell, _ in active]
        sizes = [p.size for p in scale_paths]
        vals = np.asarray(f(np.concatenate([cand_pts] + scale_paths)))
        f_cand = vals[:len(active)]
        scales = []
        offset = len(active)
        for size in sizes:
            scales.append(float(np.max(np.abs(vals[offset:offset + size]))))
            offset += size

        # verify plausible candidates by a small-rectangle winding count
        verify_idx = []
        verify_rects = []
        for i, ((cell, w), z) in enumerate(zip(active, polished)):
            if z is None or abs(f_cand[i]) > 1e-9 * max(scales[i], 1e-300):
                continue
            rad = max(1e-5 * (1.0 + abs(z)), 1e-3 * cell.diameter)
            inside = (cell.re_min < z.real - rad and z.real + rad < cell.re_max
                      and cell.im_min < z.imag - rad
                      and z.imag + rad < cell.im_max)
            if inside:
                verify_idx.append(i)
                verify_rects.append(Rectangle(z.real - rad, z.real + rad,
                                              z.imag - rad, z.imag + rad))
        verified = {}
        if verify_idx:
            for i, (wv, _) in zip(verify_idx,
                                  _windings(f, verify_rects, start=32)):
                verified[i] = wv

        to_split = []
        for i, ((cell, w), z) in enumerate(zip(active, polished)):
            found = None
            if verified.get(i) == w:
                found = LocatedZero(complex(z), w, float(abs(f_cand[i])),
                                    scales[i])
            elif cell.diameter < 1e-6 * (1.0 + abs(cell.center)):
                # coincidence scale: report the best available point
                best = z if z is not None else cell.center
                found = LocatedZero(complex(best), w,
                                    abs(complex(f(best))), scales[i])
            if found is not None:
                if all(abs(found.location - prev.location) > sep
                       for prev in zeros):
                    zeros.append(found)
            else:
                to_split.append((cell, w))

        children = []
        for cell, _ in to_split:
            children.extend(_split(cell))
        active = [(child, w) for w, child in _windings(f, children, start=64)
                  if w > 0]
        depth += 1
    zeros.sort(key=lambda z: (abs(z.location), z.location.real,
                              z.location.imag))
    return zeros


def real_zeros_bisection(f, a, b, n_scan=4000, zero_tol=1e-9):
    """Real zeros of a real-valued restriction on [a, b].

    Sign-change zeros are bisected directly.  Sign-definite double zeros
    (local minima of |f| that touch zero) are located by bisecting the
    centered finite-difference derivative and accepted only when |f| at the
    candidate is at the noise level of the local scale.
    """
    xs = np.linspace(a, b, n_scan)
    vals = np.real(np.asarray(f(xs)))
    scale = float(np.max(np.abs(vals)))
    zeros = []

    def bisect(fun, lo, hi):
        flo = fun(lo)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            fm = fun(mid)
            if fm == 0.0 or hi - lo < 1e-14 * (1.0 + abs(mid)):
                return mid
            if (flo < 0.0) != (fm < 0.0):
                hi = mid
            else:
                lo, flo = mid, fm
        return 0.5 * (lo + hi)

    fr = lambda x: float(np.real(f(np.asarray([x], dtype=complex)))[0])
    h = (b - a) / n_scan

    def dfr(x):
        return (fr(x + 0.5 * h) - fr(x - 0.5 * h)) / h

    for i in range(n_scan - 1):
        lo, hi = xs[i], xs[i + 1]
        if (vals[i] < 0.0) != (vals[i + 1] < 0.0):
            zeros.append(bisect(fr, lo, hi))
        elif 0 < i and abs(vals[i]) < abs(vals[i - 1]) \
                and abs(vals[i]) < abs(vals[i + 1]):
            # sign-definite (even-order) zero: bisect the derivative over the
            # bracket around the grid minimum and accept only true zeros
            lo = xs[i - 1]
            if (dfr(lo) < 0.0) != (dfr(hi) < 0.0):
                cand = bisect(dfr, lo, hi)
                if abs(fr(cand)) <= zero_tol * scale:
                    zeros.append(cand)
    return zeros


def oracle_eigenvalues(prob, searchbox, maxdepth=60):
    """Transmission eigenvalues lambda = k^2 from dispersion zeros in a
    k-plane rectangle with Re k > 0, sorted by |lambda|."""
    if searchbox.re_min <= 0.0:
        raise ValueError("search box must lie in the open right half k-plane")
    f = dispersion_function(prob)
    zeros = find_zeros_rectangle(f, searchbox, maxdepth=maxdepth)
    out = [LocatedZero(z.location ** 2, z.multiplicity, z.f_abs, z.scale)
           for z in zeros]
    out.sort(key=lambda z: (abs(z.location), z.location.real, z.location.imag))
    return out
