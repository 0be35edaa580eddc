import numpy as np
import pytest

from itelab.profiles import RefractiveProfile


def test_constant_accessors():
    p = RefractiveProfile.constant(3.0)
    assert p.m(0.3) == 3.0
    assert p.q(0.3) == pytest.approx(1.0 / 3.0, rel=1e-15)
    assert p.q_deriv(0.3, 1) == 0.0
    assert p.grad_q_sup == 0.0


def test_q_times_m_is_one():
    for p in (RefractiveProfile.constant(2.5),
              RefractiveProfile.gaussian(2.0, 0.8, 0.45, 0.25, assigns="m"),
              RefractiveProfile.gaussian(1.0, 0.6, 0.3, 0.7, assigns="q",
                                         domain=(-1.0, 1.0)),
              RefractiveProfile.polynomial([2.0, 0.5, -0.3], assigns="m")):
        xs = np.linspace(*p.domain, 101)
        assert np.max(np.abs(p.q(xs) * p.m(xs) - 1.0)) <= 1e-14


@pytest.mark.parametrize("assigns", ["m", "q"])
def test_gaussian_derivatives_match_finite_differences(assigns):
    p = RefractiveProfile.gaussian(1.5, 0.7, 0.4, 0.3, assigns=assigns)
    x = 0.37
    h = 1e-5
    for n in range(1, 5):
        fd = (p.q_deriv(x + h, n - 1) - p.q_deriv(x - h, n - 1)) / (2 * h)
        assert p.q_deriv(x, n) == pytest.approx(fd, rel=1e-7, abs=1e-7)


def test_polynomial_derivatives_exact():
    # q = 1 + 2x + 3x^2: q' = 2 + 6x, q'' = 6, higher derivatives vanish
    p = RefractiveProfile.polynomial([1.0, 2.0, 3.0], assigns="q")
    assert p.q_deriv(0.5, 1) == pytest.approx(5.0, rel=1e-15)
    assert p.q_deriv(0.5, 2) == pytest.approx(6.0, rel=1e-15)
    assert p.q_deriv(0.5, 7) == 0.0


def test_reciprocal_derivatives_high_order():
    # derivatives of q = 1/m for polynomial m, against sympy
    sympy = pytest.importorskip("sympy")
    x = sympy.Symbol("x")
    m_expr = 2 + sympy.Rational(1, 2) * x + sympy.Rational(3, 10) * x ** 2
    p = RefractiveProfile.polynomial([2.0, 0.5, 0.3], assigns="m")
    at = 0.631
    for n in range(0, 9):
        exact = float(sympy.diff(1 / m_expr, x, n).subs(x, at))
        assert p.q_deriv(at, n) == pytest.approx(exact, rel=1e-12, abs=1e-12)


def test_positivity_enforced():
    with pytest.raises(ValueError):
        RefractiveProfile.polynomial([0.5, -2.0], assigns="m")  # m < 0 at x=1
    with pytest.raises(ValueError):
        RefractiveProfile.constant(-1.0)


def test_grad_q_sup_gaussian_closed_form():
    # max |d/dx (amp e^{-((x-c)/w)^2})| = amp sqrt(2)/w e^{-1/2} at c +/- w/sqrt(2)
    amp, c, w = 0.6, 0.0, 0.7
    p = RefractiveProfile.gaussian(1.0, amp, c, w, assigns="q",
                                   domain=(-3.0, 3.0))
    exact = amp * np.sqrt(2.0) / w * np.exp(-0.5)
    assert p.grad_q_sup == pytest.approx(exact, rel=1e-6)


def test_describe_roundtrip():
    p = RefractiveProfile.gaussian(2.0, 0.8, 0.45, 0.25, assigns="m")
    q = RefractiveProfile.from_dict(p.describe())
    xs = np.linspace(0.0, 1.0, 11)
    assert np.allclose(p.q(xs), q.q(xs), rtol=0, atol=0)
