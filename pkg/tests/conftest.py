"""Shared fixtures: profiles and the heavyweight solves reused across tests."""

import numpy as np
import pytest

from itelab.eig import filter_converged, solve_quadratic
from itelab.oracle import DispersionProblem, oracle_eigenvalues
from itelab.pencil import DiskMode, Interval, assemble_disk_mode, assemble_interval
from itelab.profiles import RefractiveProfile
from itelab.symbols import Rectangle


@pytest.fixture(scope="session")
def profile_m3():
    return RefractiveProfile.constant(3.0, domain=(0.0, 1.0))


@pytest.fixture(scope="session")
def profile_gaussian_m():
    # perturbation bump on m; q = 1/m recovered by reciprocal differentiation
    return RefractiveProfile.gaussian(2.0, 0.8, 0.45, 0.25, assigns="m",
                                      domain=(0.0, 1.0))


@pytest.fixture(scope="session")
def profile_gaussian_q():
    return RefractiveProfile.gaussian(1.0, 0.6, 0.3, 0.7, assigns="q",
                                      domain=(-1.0, 1.0))


@pytest.fixture(scope="session")
def interval_m3_pencils(profile_m3):
    coarse = assemble_interval(profile_m3, 60, 0.0, 1.0)
    fine = assemble_interval(profile_m3, 120, 0.0, 1.0)
    return coarse, fine


@pytest.fixture(scope="session")
def interval_m3_records(interval_m3_pencils):
    coarse, fine = interval_m3_pencils
    rc = solve_quadratic(coarse)
    rf = solve_quadratic(fine)
    return filter_converged(rc, rf, match_tol=1e-5), rf


@pytest.fixture(scope="session")
def interval_gauss_records(profile_gaussian_m):
    coarse = assemble_interval(profile_gaussian_m, 60, 0.0, 1.0)
    fine = assemble_interval(profile_gaussian_m, 120, 0.0, 1.0)
    rc = solve_quadratic(coarse)
    rf = solve_quadratic(fine)
    return filter_converged(rc, rf, match_tol=1e-5), coarse


@pytest.fixture(scope="session")
def interval_oracle_zeros(profile_m3):
    prob = DispersionProblem(Interval(0.0, 1.0), 2.0)
    return oracle_eigenvalues(prob, Rectangle(0.5, 16.8, -2.0, 2.0))


@pytest.fixture(scope="session")
def disk_records(profile_m3):
    out = {}
    prof = RefractiveProfile.constant(3.0, domain=(0.0, 1.0))
    for mode in range(4):
        coarse = assemble_disk_mode(prof, mode, 30, 1.0)
        fine = assemble_disk_mode(prof, mode, 60, 1.0)
        rc = solve_quadratic(coarse, mode=mode)
        rf = solve_quadratic(fine, mode=mode)
        out[mode] = filter_converged(rc, rf, match_tol=1e-4)
    return out


@pytest.fixture(scope="session")
def disk_oracle_zeros():
    out = {}
    for mode in range(4):
        prob = DispersionProblem(DiskMode(1.0, mode), 2.0)
        out[mode] = oracle_eigenvalues(prob, Rectangle(0.3, 10.5, -1.5, 1.5))
    return out


@pytest.fixture(scope="session")
def exact_interval_lambdas():
    """Exact transmission eigenvalues for m=3 (index 2) on the unit interval.

    The dispersion determinant reduces to 2nk^2 (cos k - 1)^2 (cos k + 2):
    quadruple real zeros at k = 2 pi j and simple complex zeros at
    k = (2j+1) pi +/- i arccosh 2.
    """
    acosh2 = float(np.arccosh(2.0))
    lams = []
    for j in (1, 2, 3, 4, 5):
        kc = (2 * j - 1) * np.pi + 1j * acosh2
        lams += [kc ** 2, np.conj(kc) ** 2]
        lams += [complex((2 * np.pi * j) ** 2)] * 2
    return sorted(lams, key=abs)
