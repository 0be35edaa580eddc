import numpy as np
import pytest
from scipy.special import jv, jvp

from itelab.oracle import (BesselDomainError, DispersionProblem, LocatedZero,
                           bessel_j, bessel_j_deriv, disk_dispersion,
                           find_zeros_rectangle, interval_dispersion,
                           oracle_eigenvalues, real_zeros_bisection)
from itelab.oracle import _windings
from itelab.pencil import DiskMode, Interval
from itelab.symbols import Rectangle


class TestBessel:
    def test_values_at_zero(self):
        assert bessel_j(0, 0.0) == pytest.approx(1.0)
        assert bessel_j(1, 0.0) == 0.0
        assert bessel_j(4, 0.0) == 0.0

    def test_against_scipy_across_domain(self):
        rng = np.random.default_rng(11)
        for rad in (0.5, 3.0, 12.0, 25.0, 39.9):
            z = rad * np.exp(1j * rng.uniform(0, 2 * np.pi, 25))
            for l in range(5):
                ours = bessel_j(l, z)
                ref = jv(l, z)
                rel = np.abs(ours - ref) / np.maximum(np.abs(ref), 1e-300)
                assert np.max(rel) <= 1e-10

    def test_derivative_formula(self):
        z = np.array([0.7 + 0.2j, 5.0 - 1.0j, 20.0 + 0.5j])
        for l in range(4):
            assert np.allclose(bessel_j_deriv(l, z), jvp(l, z), rtol=1e-9,
                               atol=1e-12)

    def test_first_zero_of_j0_by_bisection(self):
        lo, hi = 2.0, 3.0
        flo = bessel_j(0, lo).real
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            fm = bessel_j(0, mid).real
            if (flo < 0) == (fm < 0):
                lo, flo = mid, fm
            else:
                hi = mid
        assert 0.5 * (lo + hi) == pytest.approx(2.4048255577, abs=1e-9)

    def test_domain_guard(self):
        with pytest.raises(BesselDomainError):
            bessel_j(0, 41.0)
        with pytest.raises(ValueError):
            bessel_j(-1, 1.0)


class TestIntervalDispersion:
    PROB = DispersionProblem(Interval(0.0, 1.0), 2.0)

    def test_degenerate_index_limit(self):
        near = DispersionProblem(Interval(0.0, 1.0), 1.0 + 1e-9)
        ks = np.array([1.0, 2.7, 5.0 + 0.3j])
        big = np.abs(interval_dispersion(ks, self.PROB))
        small = np.abs(interval_dispersion(ks, near))
        assert np.all(small <= 1e-6 * (1.0 + big))

    def test_even_in_k(self):
        ks = np.array([1.3, 2.0 + 0.5j, 7.7])
        assert np.allclose(interval_dispersion(-ks, self.PROB),
                           interval_dispersion(ks, self.PROB), rtol=1e-12)

    def test_closed_form_for_index_two(self):
        # det = n k^2 (cos k - 1)^2 (cos k + 2) for n=2, L=1
        ks = np.array([0.8, 2.2, 4.0 + 0.7j, 9.1])
        c = np.cos(ks)
        closed = 2.0 * ks ** 2 * (c - 1.0) ** 2 * (c + 2.0)
        assert np.allclose(interval_dispersion(ks, self.PROB), closed,
                           rtol=1e-10)

    def test_rejects_k_zero(self):
        with pytest.raises(ValueError):
            interval_dispersion(0.0, self.PROB)

    def test_smallest_real_zero_matches_pencil(self, interval_m3_records):
        zeros = real_zeros_bisection(
            lambda k: interval_dispersion(k, self.PROB), 0.5, 8.0)
        assert zeros, "bisection found no real dispersion zero"
        k0 = zeros[0]
        records, fine = interval_m3_records
        real_stable = [r for r in records
                       if r.stable and abs(r.lam.imag) < 1e-6 and r.lam.real > 0]
        lam0 = min(real_stable, key=lambda r: r.lam.real).lam.real
        assert abs(np.sqrt(lam0) - k0) <= 1e-6


class TestDiskDispersion:
    PROB0 = DispersionProblem(DiskMode(1.0, 0), 2.0)

    def test_degenerate_index_limit(self):
        near = DispersionProblem(DiskMode(1.0, 0), 1.0 + 1e-9)
        ks = np.array([1.0, 4.0, 2.0 + 0.4j])
        assert np.all(np.abs(disk_dispersion(ks, near)) <= 1e-6)

    def test_conjugation_symmetry(self):
        ks = np.array([1.0 + 0.7j, 3.3 - 0.2j])
        a = disk_dispersion(np.conj(ks), self.PROB0)
        b = np.conj(disk_dispersion(ks, self.PROB0))
        assert np.allclose(a, b, rtol=1e-12)

    def test_real_zeros_sign_scan_vs_argument_principle(self):
        f = lambda k: disk_dispersion(k, self.PROB0)
        by_sign = real_zeros_bisection(f, 0.5, 7.0)
        by_winding = [z.location.real
                      for z in find_zeros_rectangle(f, Rectangle(0.5, 7.0,
                                                                 -0.4, 0.4))
                      if abs(z.location.imag) < 1e-9]
        assert len(by_sign) == len(by_winding)
        for a, b in zip(sorted(by_sign), sorted(by_winding)):
            assert a == pytest.approx(b, abs=1e-8)


class TestFindZeros:
    def test_single_known_root(self):
        zeros = find_zeros_rectangle(lambda z: z * z + 1.0,
                                     Rectangle(-2.0, 2.0, 0.0, 2.0))
        assert len(zeros) == 1
        assert zeros[0].location == pytest.approx(1j, abs=1e-10)
        assert zeros[0].multiplicity == 1

    def test_constructed_polynomial(self):
        roots = [1.0 + 1.0j, 3.0, -2.0j]
        f = lambda z: (z - roots[0]) * (z - roots[1]) * (z - roots[2])
        zeros = find_zeros_rectangle(f, Rectangle(-4.0, 4.5, -3.5, 2.5))
        assert len(zeros) == 3
        for r in roots:
            assert min(abs(z.location - r) for z in zeros) <= 1e-10

    def test_double_root_multiplicity(self):
        f = lambda z: (z - (1.0 + 0.5j)) ** 2 * (z + 1.0)
        zeros = find_zeros_rectangle(f, Rectangle(-2.0, 2.0, -1.0, 1.5))
        mults = sorted(z.multiplicity for z in zeros)
        assert mults == [1, 2]
        dbl = max(zeros, key=lambda z: z.multiplicity)
        assert dbl.location == pytest.approx(1.0 + 0.5j, abs=1e-8)

    def test_zero_free_region_winding_zero(self):
        ((w, _),) = _windings(lambda z: z * z + 1.0,
                              [Rectangle(3.0, 4.0, 0.0, 1.0)])
        assert w == 0
        zeros = find_zeros_rectangle(lambda z: z * z + 1.0,
                                     Rectangle(3.0, 4.0, 0.0, 1.0))
        assert zeros == []

    def test_polished_zero_winding_one(self):
        ((w, _),) = _windings(lambda z: z * z + 1.0,
                              [Rectangle(-0.5, 0.5, 0.5, 1.5)])
        assert w == 1

    def test_residual_quality(self):
        f = lambda z: np.sin(z) * (z - 2.0 - 1.0j)
        zeros = find_zeros_rectangle(f, Rectangle(0.5, 4.0, -2.0, 2.0))
        for z in zeros:
            assert z.f_abs <= 1e-9 * z.scale


class TestOracleEigenvalues:
    def test_interval_conjugate_symmetric(self, interval_oracle_zeros):
        lams = [z.location for z in interval_oracle_zeros]
        for lam in lams:
            assert min(abs(np.conj(lam) - other) for other in lams) <= 1e-8 * (
                1.0 + abs(lam))

    def test_disk_mode0_right_half_plane(self, disk_oracle_zeros):
        assert all(z.location.real > 0.0 for z in disk_oracle_zeros[0])

    def test_box_must_be_right_of_origin(self):
        prob = DispersionProblem(Interval(0.0, 1.0), 2.0)
        with pytest.raises(ValueError):
            oracle_eigenvalues(prob, Rectangle(-1.0, 2.0, -1.0, 1.0))

    def test_interval_quadruple_zeros(self, interval_oracle_zeros):
        # k = 2 pi j are order-4 zeros of the dispersion determinant
        real_zeros = [z for z in interval_oracle_zeros
                      if abs(z.location.imag) < 1e-5]
        assert all(z.multiplicity == 4 for z in real_zeros)
        lams = sorted(z.location.real for z in real_zeros)
        assert lams[0] == pytest.approx(4 * np.pi ** 2, rel=1e-6)
