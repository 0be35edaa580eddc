"""Companion linearization and dense solution of the quadratic pencil.

(A - lambda B + lambda^2 C) x = 0 is linearized as M y = lambda L y with
M = blockdiag(A, I), L = [[B, -C], [I, 0]] and y = (x, lambda x); L is
invertible whenever C is positive definite.  The linearized problem is
handed to the dense QZ solver; residuals are backward errors in the
original pencil.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg as sla

__all__ = ["EigenvalueRecord", "SolverError", "linearize", "solve_quadratic",
           "filter_converged", "pencil_norms"]


class SolverError(RuntimeError):
    """Dense eigensolver failed to converge."""


@dataclass(frozen=True)
class EigenvalueRecord:
    """A computed pencil eigenvalue with its backward error."""

    lam: complex
    residual: float
    mode: int = -1          # disk angular mode; -1 on the interval
    mesh_N: int = 0
    stable: bool = False

    def to_dict(self):
        return {"lambda_re": self.lam.real, "lambda_im": self.lam.imag,
                "residual": self.residual, "mode": self.mode,
                "mesh_N": self.mesh_N, "stable": self.stable}


def _require_pd(C):
    try:
        np.linalg.cholesky(C)
    except np.linalg.LinAlgError as exc:
        raise ValueError("C block must be positive definite") from exc


def linearize(p):
    """First companion form (M, L) of the pencil; eigenvalues of M y = lam L y
    coincide with the pencil eigenvalues."""
    _require_pd(p.C)
    n = p.N
    eye = np.eye(n)
    zero = np.zeros((n, n))
    M = np.block([[p.A, zero], [zero, eye]])
    L = np.block([[p.B, -p.C], [eye, zero]])
    return M, L


def pencil_norms(p):
    """Spectral norms of (A, B, C); the matrices are Hermitian so the norm is
    the largest absolute eigenvalue."""
    return tuple(float(np.max(np.abs(np.linalg.eigvalsh(m))))
                 for m in (p.A, p.B, p.C))


def solve_quadratic(p, tol=1e-8, mode=None):
    """All 2N eigenvalues of the pencil with backward-error residuals.

    Residual of a pair (lam, v):
        ||A v - lam B v + lam^2 C v|| / ((||A|| + |lam| ||B|| + |lam|^2 ||C||) ||v||)
    with v the leading block of the linearized eigenvector.
    """
    if not 0.0 < tol <= 1e-4:
        raise ValueError("tol must lie in (0, 1e-4]")
    M, L = linearize(p)
    try:
        eigvals, eigvecs = sla.eig(M, L, right=True)
    except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
        raise SolverError("QZ iteration did not converge") from exc
    if not np.all(np.isfinite(eigvals)):
        raise SolverError("pencil produced non-finite eigenvalues")

    na, nb, nc = pencil_norms(p)
    if mode is None:
        mode = getattr(p.domain, "mode", -1)
    records = []
    for lam, vec in zip(eigvals, eigvecs.T):
        v = vec[:p.N]
        nv = np.linalg.norm(v)
        if nv == 0.0:
            v = vec[p.N:]
            nv = np.linalg.norm(v)
        lam = complex(lam)
        res = np.linalg.norm(p.A @ v - lam * (p.B @ v) + lam * lam * (p.C @ v))
        scale = (na + abs(lam) * nb + abs(lam) ** 2 * nc) * nv
        records.append(EigenvalueRecord(lam, float(res / scale), int(mode),
                                        p.N, False))
    records.sort(key=lambda r: (abs(r.lam), r.lam.real, r.lam.imag))
    return records


def filter_converged(coarse, fine, match_tol=1e-5, residual_tol=1e-8):
    """Mark stable exactly the coarse records with a fine-mesh partner within
    match_tol*(1+|lambda|) and residual below residual_tol."""
    fine_lams = np.array([r.lam for r in fine]) if fine else np.empty(0, complex)
    out = []
    for rec in coarse:
        stable = False
        if rec.residual <= residual_tol and fine_lams.size:
            dist = np.min(np.abs(fine_lams - rec.lam))
            stable = dist <= match_tol * (1.0 + abs(rec.lam))
        out.append(replace(rec, stable=bool(stable)))
    return out
