"""Double-double (compensated) arithmetic kernels, vectorized over numpy.

A dd real is a pair (hi, lo) of float64 arrays with hi + lo its value and
|lo| <= ulp(hi)/2; a dd complex is a pair of dd reals.  Only the handful of
operations needed by the compensated series evaluations are provided.
Error-free transforms follow Dekker and Knuth; no FMA is assumed.
"""

from __future__ import annotations

import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def quick_two_sum(a, b):
    s = a + b
    return s, b - (s - a)


def two_prod(a, b):
    p = a * b
    ta = _SPLITTER * a
    ahi = ta - (ta - a)
    alo = a - ahi
    tb = _SPLITTER * b
    bhi = tb - (tb - b)
    blo = b - bhi
    err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo
    return p, err


def dd(a):
    a = np.asarray(a, dtype=float)
    return (a, np.zeros_like(a))


def dd_add(x, y):
    s, e = two_sum(x[0], y[0])
    return quick_two_sum(s, e + x[1] + y[1])


def dd_neg(x):
    return (-x[0], -x[1])


def dd_mul(x, y):
    p, e = two_prod(x[0], y[0])
    return quick_two_sum(p, e + x[0] * y[1] + x[1] * y[0])


def dd_div_d(x, d):
    q1 = x[0] / d
    p, e = two_prod(q1, d)
    q2 = ((x[0] - p) - e + x[1]) / d
    return quick_two_sum(q1, q2)


def ddc(z):
    z = np.asarray(z, dtype=complex)
    return (dd(z.real.copy()), dd(z.imag.copy()))


def ddc_add(x, y):
    return (dd_add(x[0], y[0]), dd_add(x[1], y[1]))


def ddc_mul(x, y):
    re = dd_add(dd_mul(x[0], y[0]), dd_neg(dd_mul(x[1], y[1])))
    im = dd_add(dd_mul(x[0], y[1]), dd_mul(x[1], y[0]))
    return (re, im)


def ddc_div_d(x, d):
    return (dd_div_d(x[0], d), dd_div_d(x[1], d))


def ddc_value(x):
    return x[0][0] + x[0][1] + 1j * (x[1][0] + x[1][1])


def ddc_mag(x):
    return np.abs(x[0][0]) + np.abs(x[1][0])
