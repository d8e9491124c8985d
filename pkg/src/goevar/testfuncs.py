"""Test-function and averaging-weight families, plus the GOE variance target.

Fourier convention, used consistently everywhere in this package:

    h_hat(xi) = integral h(t) exp(-i xi t) dt,
    h(t)      = (1/2pi) integral h_hat(xi) exp(+i xi t) dxi.

Under this convention the energy average of cos(tau x) against the scaled
weight equals omegahat(T x) exactly, which the covariance kernel relies on.
The polynomial family below has fhat of finite smoothness (C^{p-1}) at the
support edges rather than C-infinity; all consumers are integrals for which
this is harmless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import spherical_jn

__all__ = [
    "TestFunction",
    "WeightFunction",
    "WeightTruncationError",
    "make_polynomial_testfn",
    "make_weight",
    "sigma2_goe",
    "closed_form_sigma2",
]


class WeightTruncationError(RuntimeError):
    """The weight's tail decays too slowly for the requested truncation bound."""


def _double_factorial_odd(n: int) -> int:
    """(2n+1)!! = 1 * 3 * ... * (2n+1)."""
    return math.prod(range(2 * n + 1, 0, -2))


@dataclass(frozen=True)
class TestFunction:
    """The pair (f, fhat) for the polynomial family fhat = (1-(xi/C0)^2)^p.

    ``support_radius`` is the radius C0 of supp(fhat).  The inverse
    transform has the closed form

        f(x) = (C0/pi) * 2^p * p! * j_p(C0 x) / (C0 x)^p,

    with j_p the spherical Bessel function, so f is evaluated exactly
    rather than from a precomputed grid.  f decays like |x|^-(p+1); p >= 2
    keeps the smooth-term quadrature absolutely convergent.
    """

    family: str
    power: int
    support_radius: float

    def fhat(self, xi):
        """Fourier transform: even, continuous, zero for |xi| >= C0."""
        xi_arr = np.asarray(xi, dtype=float)
        base = np.maximum(1.0 - (xi_arr / self.support_radius) ** 2, 0.0)
        out = base**self.power
        if np.isscalar(xi) or xi_arr.ndim == 0:
            return float(out)
        return out

    def f(self, x):
        """Inverse transform of fhat at x (vectorized, exact closed form)."""
        p = self.power
        c0 = self.support_radius
        x_arr = np.asarray(x, dtype=float)
        z = c0 * np.abs(x_arr)
        prefactor = (c0 / math.pi) * (2.0**p) * math.factorial(p)
        ratio = np.empty_like(z)
        small = z < 1e-2
        # j_p(z)/z^p by series near 0 (the direct quotient loses accuracy).
        zs = z[small]
        dfac = _double_factorial_odd(p)
        z2 = zs * zs
        ratio[small] = (
            1.0
            - z2 / (2.0 * (2 * p + 3))
            + z2 * z2 / (8.0 * (2 * p + 3) * (2 * p + 5))
            - z2 * z2 * z2 / (48.0 * (2 * p + 3) * (2 * p + 5) * (2 * p + 7))
        ) / dfac
        zl = z[~small]
        ratio[~small] = spherical_jn(p, zl) / zl**p
        out = prefactor * ratio
        if np.isscalar(x) or x_arr.ndim == 0:
            return float(out)
        return out

    def f_at_zero(self) -> float:
        p = self.power
        c0 = self.support_radius
        return (c0 / math.pi) * (2.0**p) * math.factorial(p) / _double_factorial_odd(p)

    def f_tail_envelope(self, x: float) -> float:
        """Decreasing bound on |f| for x > 0, from |j_p(z)| <= 1/z."""
        p = self.power
        c0 = self.support_radius
        if x <= 0.0:
            return self.f_at_zero()
        return min(
            self.f_at_zero(),
            (2.0**p) * math.factorial(p) / (math.pi * c0**p * x ** (p + 1)),
        )


def make_polynomial_testfn(p: int, c0: float) -> TestFunction:
    """fhat(xi) = (1 - (xi/c0)^2)^p on [-c0, c0], zero outside.

    Requires p >= 2: lower powers leave f with too little decay for the
    smooth-term quadrature.
    """
    if int(p) != p or p < 2:
        raise ValueError("polynomial power p must be an integer >= 2")
    if not (c0 > 0.0):
        raise ValueError("support radius must be > 0")
    return TestFunction(family="poly", power=int(p), support_radius=float(c0))


def closed_form_sigma2(p: int, c0: float) -> float:
    """Closed form of 2*integral |x| fhat(x)^2 dx for the polynomial family.

    Substituting u = (x/c0)^2 gives 4 c0^2 * integral_0^1 (1-u)^{2p} du / 2
    = 2 c0^2 / (2p + 1).  Used as the independent oracle for sigma2_goe.
    """
    return 2.0 * c0 * c0 / (2 * p + 1)


@lru_cache(maxsize=None)
def sigma2_goe(tf: TestFunction) -> float:
    """GOE variance target 2*integral |x| fhat(x)^2 dx, by quadrature."""
    from .numerics import DEFAULT_QUADRATURE, integrate

    c0 = tf.support_radius
    value = integrate(lambda x: x * tf.fhat(x) ** 2, 0.0, c0, DEFAULT_QUADRATURE)
    return 4.0 * value


_WEIGHT_FAMILIES = ("fejer", "bspline4")


@dataclass(frozen=True)
class WeightFunction:
    """The pair (omega, omegahat): omega >= 0, integral 1, supp(omegahat) in [-1,1].

    fejer:    omegahat(xi) = (1-|xi|)_+,   omega(s) = (2/pi) sin^2(s/2)/s^2.
              omega decays like 1/s^2, so truncation bounds below ~1e-4
              are out of reach; use bspline4 for direct-quadrature checks.
    bspline4: omegahat = normalized self-convolution of the width-1 triangle
              (piecewise cubic, C^2), omega(s) = (3/8pi) sinc^4(s/4) with
              sinc(x) = sin(x)/x; omega decays like 1/s^4.
    """

    family: str

    def omegahat(self, xi):
        xi_arr = np.asarray(xi, dtype=float)
        a = np.abs(xi_arr)
        if self.family == "fejer":
            out = np.maximum(1.0 - a, 0.0)
        else:
            out = np.where(
                a <= 0.5,
                1.0 - 6.0 * a * a + 6.0 * a * a * a,
                np.where(a <= 1.0, 2.0 * (1.0 - a) ** 3, 0.0),
            )
        if np.isscalar(xi) or xi_arr.ndim == 0:
            return float(out)
        return out

    def omega(self, s):
        s_arr = np.asarray(s, dtype=float)
        if self.family == "fejer":
            # (2/pi) sin^2(s/2)/s^2 written via sinc to be exact at 0.
            out = np.sinc(s_arr / (2.0 * math.pi)) ** 2 / (2.0 * math.pi)
        else:
            out = (3.0 / (8.0 * math.pi)) * np.sinc(s_arr / (4.0 * math.pi)) ** 4
        if np.isscalar(s) or s_arr.ndim == 0:
            return float(out)
        return out

    def tail_mass_bound(self, K: float) -> float:
        """Upper bound on integral of omega over |s| > K."""
        if K <= 0.0:
            return math.inf
        if self.family == "fejer":
            # omega <= 2/(pi s^2).
            return 4.0 / (math.pi * K)
        # omega <= (3/8pi) (4/s)^4 = 96/(pi s^4).
        return 64.0 / (math.pi * K**3)

    def truncation_radius(self, tail_bound: float, max_radius: float = 1e4) -> float:
        """Smallest K with tail_mass_bound(K) <= tail_bound.

        Raises :class:`WeightTruncationError` when K would exceed
        ``max_radius`` (the practical panel-count limit), which happens for
        the fejer weight at bounds below ~1.3e-4.
        """
        if not (tail_bound > 0.0):
            raise ValueError("tail_bound must be > 0")
        if self.family == "fejer":
            K = 4.0 / (math.pi * tail_bound)
        else:
            K = (64.0 / (math.pi * tail_bound)) ** (1.0 / 3.0)
        if K > max_radius:
            raise WeightTruncationError(
                f"{self.family} weight cannot reach tail bound {tail_bound:g} "
                f"within truncation radius {max_radius:g}; use the bspline4 weight"
            )
        return K


def make_weight(family: str) -> WeightFunction:
    if family not in _WEIGHT_FAMILIES:
        raise ValueError(f"unknown weight family {family!r}; expected one of {_WEIGHT_FAMILIES}")
    return WeightFunction(family=family)
