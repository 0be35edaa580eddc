"""Galerkin assembly of the quadratic pencil A - lambda*B + lambda^2*C.

The weak forms on a clamped (value and first derivative zero on the
boundary) conforming basis are

    A  <->  integral q u'' conj(phi)''
    B1 <-> -integral q (u'' conj(phi) + u conj(phi)'')
    B2 <->  integral u' conj(phi)'
    C  <->  integral (1+q) u conj(phi)

with B = B1 + B2.  On the interval the basis is C^2 quintic Hermite
elements; on the disk (per angular mode l) it is a weighted Jacobi
polynomial basis r^l * (1-(r/R)^2)^2 * P_k^{(4,l)}(2(r/R)^2-1), whitened
against the mass Gram matrix by a Cholesky congruence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import eval_jacobi

from .profiles import RefractiveProfile

__all__ = [
    "Interval", "DiskMode", "PencilForms", "DiscretePencil",
    "ConditioningError", "assemble_interval", "assemble_disk_mode",
    "quadratic_form_T", "realpart_identity_check",
]


class ConditioningError(RuntimeError):
    """Basis Gram matrix too ill-conditioned; reduce the basis size."""


@dataclass(frozen=True)
class Interval:
    a: float
    b: float


@dataclass(frozen=True)
class DiskMode:
    radius: float
    mode: int


@dataclass(frozen=True)
class PencilForms:
    """Auxiliary quadratic forms used by the real-part identity checks."""

    S: np.ndarray       # Dirichlet form  int u' phi'
    Sq: np.ndarray      # weighted form   int q u' phi'
    M: np.ndarray       # mass            int u phi
    B1: np.ndarray      # -int q (u'' phi + u phi'')
    B2: np.ndarray      # int u' phi'
    G: np.ndarray       # int q' u' phi   (gradient coupling, nonsymmetric)


@dataclass(frozen=True)
class DiscretePencil:
    """Hermitian matrices of the discretized quadratic pencil."""

    N: int
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    domain: Interval | DiskMode
    aux: PencilForms | None = None


def _sym(m):
    return 0.5 * (m + m.T)


# -- quintic Hermite shape functions on the reference element [0, 1] ------
# dof order: value, d1, d2 at the left node, then at the right node.
_SHAPE_COEFS = np.array([
    [1.0, 0.0, 0.0, -10.0, 15.0, -6.0],
    [0.0, 1.0, 0.0, -6.0, 8.0, -3.0],
    [0.0, 0.0, 0.5, -1.5, 1.5, -0.5],
    [0.0, 0.0, 0.0, 10.0, -15.0, 6.0],
    [0.0, 0.0, 0.0, -4.0, 7.0, -3.0],
    [0.0, 0.0, 0.0, 0.5, -1.0, 0.5],
])


def _hermite_shapes(t, dx):
    """Shape values and first two derivatives at reference points t, scaled
    so derivative dofs carry physical units for an element of size dx."""
    pow0 = np.vstack([t ** j for j in range(6)])
    pow1 = np.vstack([j * t ** (j - 1) if j >= 1 else np.zeros_like(t)
                      for j in range(6)])
    pow2 = np.vstack([j * (j - 1) * t ** (j - 2) if j >= 2 else np.zeros_like(t)
                      for j in range(6)])
    scale = np.array([1.0, dx, dx * dx, 1.0, dx, dx * dx])[:, None]
    H = (_SHAPE_COEFS @ pow0) * scale
    H1 = (_SHAPE_COEFS @ pow1) * scale / dx
    H2 = (_SHAPE_COEFS @ pow2) * scale / dx ** 2
    return H, H1, H2


def interval_element_count(N):
    """Largest quintic-Hermite element count whose clamped basis has size
    3E-1 <= N."""
    return max(2, (N + 1) // 3)


def assemble_interval(profile, N, a, b, with_aux=True, ngauss=15):
    """Assemble the pencil on (a, b) over clamped quintic Hermite elements.

    The basis size is 3E-1 for E elements with E chosen as the largest value
    not exceeding the requested N; the actual size is recorded in the result.
    """
    if N < 4:
        raise ValueError("basis size must be at least 4")
    if not b > a:
        raise ValueError("domain must satisfy b > a")
    nelem = interval_element_count(N)
    nodes = np.linspace(a, b, nelem + 1)
    ndof = 3 * (nelem + 1)

    gx, gw = np.polynomial.legendre.leggauss(ngauss)
    gx = 0.5 * (gx + 1.0)
    gw = 0.5 * gw

    A = np.zeros((ndof, ndof))
    B1 = np.zeros_like(A)
    B2 = np.zeros_like(A)
    C = np.zeros_like(A)
    S = np.zeros_like(A)
    Sq = np.zeros_like(A)
    M = np.zeros_like(A)
    G = np.zeros_like(A)

    for e in range(nelem):
        x0 = nodes[e]
        dx = nodes[e + 1] - x0
        xq = x0 + gx * dx
        w = gw * dx
        qv = np.asarray(profile.q(xq), dtype=float)
        if not np.all(np.isfinite(qv)):
            raise ValueError("profile produced non-finite values in quadrature")
        dqv = np.asarray(profile.q_deriv(xq, 1), dtype=float)
        H, H1, H2 = _hermite_shapes(gx, dx)
        sl = slice(3 * e, 3 * e + 6)
        A[sl, sl] += (H2 * (w * qv)) @ H2.T
        B1[sl, sl] += -((H2 * (w * qv)) @ H.T + (H * (w * qv)) @ H2.T)
        B2[sl, sl] += (H1 * w) @ H1.T
        C[sl, sl] += (H * (w * (1.0 + qv))) @ H.T
        if with_aux:
            S[sl, sl] += (H1 * w) @ H1.T
            Sq[sl, sl] += (H1 * (w * qv)) @ H1.T
            M[sl, sl] += (H * w) @ H.T
            G[sl, sl] += (H * (w * dqv)) @ H1.T

    # clamped conditions: drop value and first-derivative dofs at both ends
    keep = np.r_[2, np.arange(3, ndof - 3), ndof - 1]
    ix = np.ix_(keep, keep)
    aux = None
    if with_aux:
        aux = PencilForms(_sym(S[ix]), _sym(Sq[ix]), _sym(M[ix]),
                          _sym(B1[ix]), _sym(B2[ix]), G[ix])
    return DiscretePencil(keep.size, _sym(A[ix]), _sym(B1[ix]) + _sym(B2[ix]),
                          _sym(C[ix]), Interval(float(a), float(b)), aux)


# -- disk (per angular mode) ------------------------------------------------

def _disk_basis(N, l, R, r):
    """Basis values, radial derivative, and the mode Laplacian
    -(f'' + f'/r - l^2 f / r^2) at radii r, shape (N, len(r))."""
    rho = r / R
    t = 2.0 * rho ** 2 - 1.0
    dt = 4.0 * r / R ** 2
    wgt = (1.0 - rho ** 2) ** 2
    dwgt = -4.0 * rho * (1.0 - rho ** 2) / R
    d2wgt = (12.0 * rho ** 2 - 4.0) / R ** 2
    rl = r ** l
    drl = l * r ** (l - 1) if l > 0 else np.zeros_like(r)
    d2rl = l * (l - 1) * r ** (l - 2) if l > 1 else np.zeros_like(r)
    g = rl * wgt
    dg = drl * wgt + rl * dwgt
    d2g = d2rl * wgt + 2.0 * drl * dwgt + rl * d2wgt

    f = np.empty((N, r.size))
    df = np.empty_like(f)
    p0f = np.empty_like(f)
    for k in range(N):
        c = eval_jacobi(k, 4, l, t)
        dc = (0.5 * (k + 4 + l + 1) * eval_jacobi(k - 1, 5, l + 1, t)
              if k >= 1 else np.zeros_like(t))
        d2c = (0.25 * (k + 4 + l + 1) * (k + 4 + l + 2)
               * eval_jacobi(k - 2, 6, l + 2, t) if k >= 2 else np.zeros_like(t))
        fk = c * g
        dfk = dc * dt * g + c * dg
        d2fk = d2c * dt ** 2 * g + dc * (4.0 / R ** 2) * g + 2.0 * dc * dt * dg \
            + c * d2g
        f[k] = fk
        df[k] = dfk
        p0f[k] = -(d2fk + dfk / r - (l * l) * fk / r ** 2)
    return f, df, p0f


def assemble_disk_mode(profile, l, N, R, with_aux=True, cond_limit=1e12):
    """Assemble the pencil for angular mode l on the disk of radius R with
    measure r dr, over the weighted Jacobi basis."""
    if l < 0 or int(l) != l:
        raise ValueError("angular mode must be a nonnegative integer")
    if N < 4:
        raise ValueError("basis size must be at least 4")
    ngauss = l + 2 * N + 14
    gx, gw = np.polynomial.legendre.leggauss(ngauss)
    r = 0.5 * (gx + 1.0) * R
    w = 0.5 * gw * R * r

    qv = np.asarray(profile.q(r), dtype=float)
    if not np.all(np.isfinite(qv)):
        raise ValueError("profile produced non-finite values in quadrature")
    dqv = np.asarray(profile.q_deriv(r, 1), dtype=float)

    f, df, p0f = _disk_basis(N, int(l), R, r)
    mass = _sym((f * w) @ f.T)
    cond = np.linalg.cond(mass)
    if cond > cond_limit:
        raise ConditioningError(
            f"mass Gram condition number {cond:.3e} exceeds {cond_limit:.0e};"
            " reduce N")
    chol = np.linalg.cholesky(mass)
    white = np.linalg.inv(chol)

    def build(mat, sym=True):
        out = white @ (_sym(mat) if sym else mat) @ white.T
        return _sym(out) if sym else out

    A = build((p0f * (w * qv)) @ p0f.T)
    B1 = build((p0f * (w * qv)) @ f.T + (f * (w * qv)) @ p0f.T)
    B2 = build((df * w) @ df.T + (l * l) * ((f * (w / r ** 2)) @ f.T))
    C = build((f * (w * (1.0 + qv))) @ f.T)
    aux = None
    if with_aux:
        aux = PencilForms(build((df * w) @ df.T + (l * l) * ((f * (w / r ** 2)) @ f.T)),
                          build((df * (w * qv)) @ df.T + (l * l) * ((f * (w * qv / r ** 2)) @ f.T),),
                          build((f * w) @ f.T),
                          B1, B2,
                          build((f * (w * dqv)) @ df.T, sym=False))
    return DiscretePencil(N, A, B1 + B2, C, DiskMode(float(R), int(l)), aux)


# -- quadratic forms --------------------------------------------------------

def quadratic_form_T(p, lam, x):
    """x* (A - lambda B + lambda^2 C) x."""
    x = np.asarray(x)
    if x.shape != (p.N,):
        raise ValueError(f"vector length {x.shape} does not match basis {p.N}")
    lam = complex(lam)
    xc = np.conj(x)
    return (xc @ (p.A @ x) - lam * (xc @ (p.B @ x))
            + lam * lam * (xc @ (p.C @ x)))


def realpart_identity_check(p, lam, x):
    """Residual of the real-part expansion of the pencil form for
    Re lambda < 0:

        Re x*T(lam)x = x*Ax + |Re lam| x*B1x + |Re lam| x*B2x
                       + ((Re lam)^2 - (Im lam)^2) x*Cx.

    The identity is algebraic for Hermitian forms; the returned residual is
    pure floating-point noise.
    """
    if p.aux is None:
        raise ValueError("pencil assembled without auxiliary forms")
    lam = complex(lam)
    if lam.real >= 0.0:
        raise ValueError("identity holds in the form stated for Re lambda < 0")
    x = np.asarray(x)
    xc = np.conj(x)
    lhs = quadratic_form_T(p, lam, x).real
    rhs = (xc @ (p.A @ x)).real \
        + abs(lam.real) * (xc @ (p.aux.B1 @ x)).real \
        + abs(lam.real) * (xc @ (p.aux.B2 @ x)).real \
        + (lam.real ** 2 - lam.imag ** 2) * (xc @ (p.C @ x)).real
    return abs(lhs - rhs)
