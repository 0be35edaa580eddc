"""Refractive-index profiles.

A profile describes the positive perturbation m on the closed domain, the
reciprocal q = 1/m, and exact derivatives of q to arbitrary order.  Three
closed-form families are supported (constant, gaussian bump, polynomial);
the family may parameterize either m or q directly, the other function is
recovered by exact reciprocal differentiation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

__all__ = ["RefractiveProfile"]


def _poly_derivs(coeffs, x, order):
    """Derivatives 0..order of sum_j coeffs[j] x^j, vectorized in x."""
    c = np.asarray(coeffs, dtype=float)
    out = []
    for n in range(order + 1):
        out.append(np.polynomial.polynomial.polyval(x, c))
        c = np.polynomial.polynomial.polyder(c) if c.size > 1 else np.zeros(1)
    return out


def _gaussian_derivs(x, base, amplitude, center, width, order):
    """Derivatives 0..order of base + amplitude*exp(-((x-center)/width)^2).

    d^n/dx^n exp(-u^2) = (-1/w)^n H_n(u) exp(-u^2) with physicists' Hermite H_n.
    """
    u = (np.asarray(x, dtype=float) - center) / width
    e = np.exp(-u * u)
    hermite = [np.ones_like(u), 2.0 * u]
    for n in range(1, order):
        hermite.append(2.0 * u * hermite[n] - 2.0 * n * hermite[n - 1])
    out = [base + amplitude * e]
    for n in range(1, order + 1):
        out.append(amplitude * (-1.0 / width) ** n * hermite[n] * e)
    return out


def _reciprocal_derivs(f_derivs):
    """Derivatives of 1/f from derivatives of f (Leibniz recursion)."""
    g0 = 1.0 / f_derivs[0]
    out = [g0]
    for n in range(1, len(f_derivs)):
        acc = 0.0
        for j in range(1, n + 1):
            acc = acc + comb(n, j) * f_derivs[j] * out[n - j]
        out.append(-acc * g0)
    return out


@dataclass(frozen=True)
class RefractiveProfile:
    """Positive perturbation m with q = 1/m and analytic q-derivatives.

    ``kind`` is one of ``constant``, ``gaussian``, ``polynomial``; ``assigns``
    says whether the closed form parameterizes ``m`` or ``q``.  ``domain`` is
    the closed interval (radial interval for disks) the profile lives on.
    """

    kind: str
    assigns: str
    params: dict = field(repr=False)
    domain: tuple[float, float] = (0.0, 1.0)

    _GRAD_SAMPLES = 4001

    def __post_init__(self):
        if self.kind not in ("constant", "gaussian", "polynomial"):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.assigns not in ("m", "q"):
            raise ValueError("assigns must be 'm' or 'q'")
        xs = np.linspace(*self.domain, 257)
        mv = self.m(xs)
        if not np.all(np.isfinite(mv)) or np.min(mv) <= 0.0:
            raise ValueError("profile must satisfy m > 0 on the closed domain")

    # -- constructors -----------------------------------------------------

    @classmethod
    def constant(cls, m, domain=(0.0, 1.0)):
        return cls("constant", "m", {"value": float(m)}, tuple(domain))

    @classmethod
    def gaussian(cls, base, amplitude, center, width, assigns="m",
                 domain=(0.0, 1.0)):
        params = {"base": float(base), "amplitude": float(amplitude),
                  "center": float(center), "width": float(width)}
        return cls("gaussian", assigns, params, tuple(domain))

    @classmethod
    def polynomial(cls, coeffs, assigns="m", domain=(0.0, 1.0)):
        return cls("polynomial", assigns, {"coeffs": [float(c) for c in coeffs]},
                   tuple(domain))

    # -- base family ------------------------------------------------------

    def _base_derivs(self, x, order):
        if self.kind == "constant":
            x = np.asarray(x, dtype=float)
            zero = np.zeros_like(x)
            return [np.full_like(x, self.params["value"])] + [zero] * order
        if self.kind == "gaussian":
            p = self.params
            return _gaussian_derivs(x, p["base"], p["amplitude"], p["center"],
                                    p["width"], order)
        return _poly_derivs(self.params["coeffs"], np.asarray(x, dtype=float),
                            order)

    # -- accessors --------------------------------------------------------

    def m(self, x):
        base = self._base_derivs(x, 0)[0]
        return base if self.assigns == "m" else 1.0 / base

    def q(self, x):
        base = self._base_derivs(x, 0)[0]
        return 1.0 / base if self.assigns == "m" else base

    def q_derivs(self, x, order):
        """List [q, q', ..., q^(order)] evaluated at x (scalar or array)."""
        base = self._base_derivs(x, order)
        return base if self.assigns == "q" else _reciprocal_derivs(base)

    def q_deriv(self, x, order):
        return self.q_derivs(x, order)[order]

    @property
    def grad_q_sup(self):
        """sup |q'| over the domain, by dense sampling."""
        xs = np.linspace(*self.domain, self._GRAD_SAMPLES)
        return float(np.max(np.abs(self.q_deriv(xs, 1))))

    @property
    def m_min(self):
        xs = np.linspace(*self.domain, self._GRAD_SAMPLES)
        return float(np.min(self.m(xs)))

    # -- serialization ----------------------------------------------------

    def describe(self):
        return {"kind": self.kind, "assigns": self.assigns,
                "params": dict(self.params), "domain": list(self.domain)}

    @classmethod
    def from_dict(cls, d):
        kind = d["kind"]
        domain = tuple(d.get("domain", (0.0, 1.0)))
        if kind == "constant":
            return cls.constant(d.get("m", d.get("params", {}).get("value")),
                                domain)
        assigns = d.get("assigns", "m")
        params = d.get("params", d)
        if kind == "gaussian":
            return cls.gaussian(params["base"], params["amplitude"],
                                params["center"], params["width"], assigns,
                                domain)
        if kind == "polynomial":
            return cls.polynomial(params["coeffs"], assigns, domain)
        raise ValueError(f"unknown profile kind {kind!r}")
