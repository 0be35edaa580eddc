import numpy as np
import pytest

from itelab.eig import (EigenvalueRecord, SolverError, filter_converged,
                        linearize, pencil_norms, solve_quadratic)
from itelab.pencil import DiscretePencil, Interval


def make_pencil(A, B, C):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.atleast_2d(np.asarray(B, dtype=float))
    C = np.atleast_2d(np.asarray(C, dtype=float))
    return DiscretePencil(A.shape[0], A, B, C, Interval(0.0, 1.0))


def det_poly_roots(p):
    """Roots of det(A - lam B + lam^2 C) by sampling on a circle enclosing
    the spectrum and exact DFT coefficient recovery; an independent route
    through numpy's polynomial companion solver."""
    n = p.N
    deg = 2 * n
    # |lam|^2 lam_min(C) <= ||A|| + |lam| ||B|| bounds every eigenvalue
    na = np.linalg.norm(p.A, 2)
    nb = np.linalg.norm(p.B, 2)
    cmin = np.min(np.linalg.eigvalsh(p.C))
    radius = 1.1 * (nb + np.sqrt(nb * nb + 4.0 * cmin * na)) / (2.0 * cmin)
    m = deg + 1
    ts = radius * np.exp(2j * np.pi * np.arange(m) / m)
    vals = np.array([np.linalg.det(p.A - t * p.B + t * t * p.C) for t in ts])
    coeffs = np.fft.fft(vals) / m / radius ** np.arange(m)
    return np.roots(coeffs[::-1])


def match_multisets(a, b, tol):
    """Greedy one-to-one matching; returns the largest pair distance."""
    b = list(b)
    worst = 0.0
    for x in a:
        j = int(np.argmin([abs(x - y) for y in b]))
        worst = max(worst, abs(x - b[j]) / (1.0 + abs(x)))
        b.pop(j)
    return worst


class TestLinearize:
    def test_scalar_quadratic(self):
        p = make_pencil(2.0, 3.0, 1.0)   # lam^2 - 3 lam + 2
        recs = solve_quadratic(p)
        lams = sorted(r.lam.real for r in recs)
        assert lams == pytest.approx([1.0, 2.0], rel=1e-12)
        assert all(r.residual <= 1e-14 for r in recs)

    def test_l_block_invertible(self, interval_m3_pencils):
        p = interval_m3_pencils[0]
        M, L = linearize(p)
        sign, logdet_l = np.linalg.slogdet(L)
        _, logdet_c = np.linalg.slogdet(p.C)
        assert sign != 0
        assert logdet_l == pytest.approx(logdet_c, rel=1e-10)

    def test_rejects_indefinite_c(self):
        p = make_pencil(np.eye(2), np.eye(2), np.diag([1.0, -1.0]))
        with pytest.raises(ValueError):
            linearize(p)


class TestSolveQuadratic:
    def test_diagonal_union_of_scalar_roots(self):
        a = np.diag([2.0, 6.0, 3.0])
        b = np.diag([3.0, 5.0, 4.0])
        c = np.diag([1.0, 1.0, 1.0])
        p = make_pencil(a, b, c)
        expected = []
        for i in range(3):
            expected.extend(np.roots([c[i, i], -b[i, i], a[i, i]]))
        recs = solve_quadratic(p)
        worst = match_multisets([r.lam for r in recs], expected, 1e-10)
        assert worst <= 1e-10

    def test_count_and_finiteness(self, interval_m3_pencils):
        p = interval_m3_pencils[0]
        recs = solve_quadratic(p)
        assert len(recs) == 2 * p.N
        assert all(np.isfinite(r.lam.real) and np.isfinite(r.lam.imag)
                   for r in recs)

    @pytest.mark.parametrize("seed", range(6))
    def test_determinant_oracle_small_random(self, seed):
        rng = np.random.default_rng(seed)
        n = rng.integers(2, 5)
        def herm(scale=1.0):
            m = rng.normal(size=(n, n))
            return scale * (m + m.T) / 2
        a, b = herm(), herm()
        r = rng.normal(size=(n, n))
        c = r @ r.T + n * np.eye(n)
        p = make_pencil(a, b, c)
        recs = solve_quadratic(p)
        worst = match_multisets([r_.lam for r_ in recs], det_poly_roots(p),
                                1e-8)
        assert worst <= 1e-8

    def test_conjugate_closure(self, interval_m3_pencils):
        p = interval_m3_pencils[0]
        lams = np.array([r.lam for r in solve_quadratic(p)])
        for lam in lams:
            d = np.min(np.abs(lams - np.conj(lam)))
            assert d <= 1e-8 * (1.0 + abs(lam))

    def test_tol_validation(self, interval_m3_pencils):
        with pytest.raises(ValueError):
            solve_quadratic(interval_m3_pencils[0], tol=1e-3)

    def test_residual_definition(self):
        p = make_pencil(np.diag([2.0, 5.0]), np.diag([3.0, 2.0]), np.eye(2))
        recs = solve_quadratic(p)
        na, nb, nc = pencil_norms(p)
        for r in recs:
            lam = r.lam
            # eigenvector of a diagonal pencil is a coordinate vector
            res_cols = np.abs(np.diag(p.A) - lam * np.diag(p.B)
                              + lam ** 2 * np.diag(p.C))
            expected = res_cols.min() / (na + abs(lam) * nb
                                         + abs(lam) ** 2 * nc)
            assert r.residual <= expected + 1e-12


class TestFilter:
    def rec(self, lam, residual=1e-15, n=10):
        return EigenvalueRecord(lam, residual, -1, n, False)

    def test_identical_lists_all_stable(self):
        coarse = [self.rec(1.0 + 1j), self.rec(2.0)]
        out = filter_converged(coarse, coarse, match_tol=1e-10)
        assert all(r.stable for r in out)

    def test_no_partner_unstable(self):
        out = filter_converged([self.rec(1.0)], [self.rec(50.0)],
                               match_tol=1e-6)
        assert not out[0].stable

    def test_residual_gate(self):
        noisy = self.rec(1.0, residual=1e-3)
        out = filter_converged([noisy], [self.rec(1.0)], match_tol=1e-6)
        assert not out[0].stable

    def test_oracle_eigenvalues_survive(self, interval_m3_records,
                                        exact_interval_lambdas):
        records, _ = interval_m3_records
        stable = sorted((r for r in records if r.stable),
                        key=lambda r: abs(r.lam))
        assert len(stable) >= 8
        for r in stable[:8]:
            err = min(abs(r.lam - e) / abs(e) for e in exact_interval_lambdas)
            assert err <= 1e-5
