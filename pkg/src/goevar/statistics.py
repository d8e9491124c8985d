"""Statistic kernels and direct energy averaging.

The objects here sit on the geometric side of the trace-formula identity:
the window kernel H_L, the winding-expanded kernel H_{L,tau}, the energy
covariance kernel U_T, the oscillating linear statistic over a length
configuration, and the smooth (Weyl-type) term and windowed eigenvalue
count for ingested spectral data.  Direct quadrature over the energy
variable (energy_average / energy_variance_direct) lives here as the
independent oracle for the closed-form pair functional; it is deliberately
restricted to small problems because its cost grows with T times the top
oscillation frequency.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .numerics import composite_kronrod, _eval_panels
from .pointprocess import LengthConfiguration
from .testfuncs import TestFunction, WeightFunction

__all__ = [
    "WindowParams",
    "EigenvalueList",
    "kernel_HL",
    "kernel_H_L_tau",
    "kernel_UT",
    "oscillating_statistic",
    "smooth_term",
    "spectral_count",
    "energy_average",
    "energy_variance_direct",
    "load_eigenvalue_file",
    "admissible_windings",
]

# Direct tau-quadrature cost guards: the closed-form pair functional is the
# production path, this module's variance is an oracle only.
MAX_DIRECT_MARKS = 10_000
MAX_DIRECT_T = 1e3
MAX_PANELS = 5_000_000


@dataclass(frozen=True)
class WindowParams:
    """Window length L, energy-average scale T, and window center tau."""

    L: float
    T: float
    tau: float = 0.0

    def __post_init__(self):
        if not (self.L > 0.0) or not (self.T > 0.0):
            raise ValueError("L and T must be positive")
        if self.tau < 0.0:
            raise ValueError("tau must be >= 0")

    def is_admissible(self, c: float = 1.0) -> bool:
        """Whether L <= c*log(T); reported, never enforced."""
        return self.L <= c * math.log(self.T)


@dataclass(frozen=True)
class EigenvalueList:
    """Spectral parameters r_j >= 0 (eigenvalue 1/4 + r_j^2) with the genus."""

    r_values: np.ndarray
    genus: int

    def __post_init__(self):
        arr = np.sort(np.asarray(self.r_values, dtype=float))
        if arr.size and arr[0] < 0.0:
            raise ValueError("spectral parameters must be >= 0")
        if self.genus < 2:
            raise ValueError("genus must be >= 2")
        object.__setattr__(self, "r_values", arr)


def kernel_HL(x, tf: TestFunction, L: float):
    """H_L(x) = x * fhat(x/L) / sinh(x/2) for x >= 0.

    Vanishes for x >= C0*L (support of fhat); the removable value at 0 is
    2*fhat(0) since x/sinh(x/2) -> 2.
    """
    x_arr = np.asarray(x, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = x_arr * tf.fhat(x_arr / L) / np.sinh(0.5 * x_arr)
    out = np.where(x_arr == 0.0, 2.0 * tf.fhat(0.0), val)
    if np.isscalar(x) or x_arr.ndim == 0:
        return float(out)
    return out


def kernel_H_L_tau(x: float, tf: TestFunction, L: float, tau: float) -> float:
    """H_{L,tau}(x) = (2x/L) * sum_k fhat(kx/L) cos(k x tau) / sinh(kx/2).

    The winding sum is finite: only k with k*x < C0*L contribute, so the
    cutoff is exact rather than a tolerance.  x = 0 is rejected (the
    cutoff is undefined there).
    """
    if not (x > 0.0):
        raise ValueError("kernel_H_L_tau requires x > 0")
    c0l = tf.support_radius * L
    k_max = math.ceil(c0l / x) - 1
    if k_max < 1:
        return 0.0
    k = np.arange(1, k_max + 1, dtype=float)
    m = k * x
    return float(np.sum((2.0 / L) * kernel_HL(m, tf, L) * np.cos(m * tau) / k))


def kernel_UT(x, y, wf: WeightFunction, T: float):
    """Energy covariance kernel of two cosines:

    U_T(x, y) = omegahat(T(x-y))/2 + omegahat(T(x+y))/2
                - omegahat(Tx) * omegahat(Ty).

    Real, symmetric, and zero whenever all three arguments leave the
    weight's support [-1, 1].
    """
    x_arr = np.asarray(x, dtype=float)
    y_arr = np.asarray(y, dtype=float)
    out = (
        0.5 * wf.omegahat(T * (x_arr - y_arr))
        + 0.5 * wf.omegahat(T * (x_arr + y_arr))
        - wf.omegahat(T * x_arr) * wf.omegahat(T * y_arr)
    )
    if np.isscalar(x) and np.isscalar(y):
        return float(out)
    return out


def admissible_windings(lengths: np.ndarray, c0l: float):
    """Expand lengths into all (length, winding k) pairs with k*length < c0l.

    Returns (point_index, repeated_length, k) arrays in point-major order.
    Lengths at or beyond c0l contribute nothing.
    """
    lengths = np.asarray(lengths, dtype=float)
    if lengths.size == 0:
        empty_i = np.empty(0, dtype=np.int64)
        return empty_i, np.empty(0, dtype=float), empty_i
    counts = np.where(
        lengths < c0l, np.ceil(c0l / np.maximum(lengths, 1e-300)).astype(np.int64) - 1, 0
    )
    counts = np.maximum(counts, 0)
    total = int(counts.sum())
    point_id = np.repeat(np.arange(lengths.size, dtype=np.int64), counts)
    ell = np.repeat(lengths, counts)
    # k runs 1..counts[i] within each point's block.
    offsets = np.concatenate([[0], np.cumsum(counts)[:-1]])
    k = np.arange(total, dtype=np.int64) - np.repeat(offsets, counts) + 1
    # Guard against float edge cases of the ceil cutoff.
    keep = k * ell < c0l
    return point_id[keep], ell[keep], k[keep]


def oscillating_statistic(
    cfg: LengthConfiguration, tf: TestFunction, L: float, tau: float
) -> float:
    """Sum of H_{L,tau} over the configuration's points.

    Equals the fluctuating part of the windowed eigenvalue count when the
    configuration is a surface's primitive length spectrum.
    """
    _, ell, k = admissible_windings(cfg.lengths, tf.support_radius * L)
    if ell.size == 0:
        return 0.0
    m = k * ell
    w = (2.0 / L) * kernel_HL(m, tf, L) / k
    return float(np.sum(w * np.cos(m * tau)))


def smooth_term(
    genus: int,
    tf: TestFunction,
    L: float,
    tau: float,
    *,
    rel_tol: float = 1e-6,
) -> float:
    """Weyl-type term 2(g-1) * integral f(L(r - tau)) r tanh(pi r) dr.

    Computed in the window variable u = L(r - tau); the domain is truncated
    where the envelope of f makes the remainder negligible relative to the
    leading behavior 2 tau (g-1) fhat(0) / L (valid for large tau*L).
    """
    if genus < 2:
        raise ValueError("genus must be >= 2")
    if not (L > 0.0):
        raise ValueError("L must be > 0")
    p = tf.power
    c0 = tf.support_radius
    prefactor = 2.0 * (genus - 1) / L
    lead = 2.0 * tau * (genus - 1) / L * tf.fhat(0.0)
    tol_abs = rel_tol * max(1.0, abs(lead))
    # |f(u)| <= A / u^(p+1) for u > 0.
    A = (2.0**p) * math.factorial(p) / (math.pi * c0**p)

    def tail_bound(U: float) -> float:
        return prefactor * 2.0 * A * (
            abs(tau) / (p * U**p) + 1.0 / ((p - 1) * L * U ** (p - 1))
        )

    U = 8.0 / c0
    while tail_bound(U) > tol_abs and U < 1e7:
        U *= 2.0

    def integrand(u):
        r = tau + u / L
        return tf.f(u) * r * np.tanh(math.pi * r)

    panel = (2.0 * math.pi / c0) / 16.0
    n_panels = int(math.ceil(2.0 * U / panel))
    if n_panels > MAX_PANELS:
        raise ValueError("smooth_term truncation window too wide to resolve")
    edges = np.linspace(-U, U, n_panels + 1)
    value, _ = composite_kronrod(integrand, edges)
    return prefactor * value


def spectral_count(ev: EigenvalueList, tf: TestFunction, L: float, tau: float) -> float:
    """Windowed count sum_j f(L(r_j - tau)) + f(L(r_j + tau))."""
    r = ev.r_values
    if r.size == 0:
        return 0.0
    return float(np.sum(tf.f(L * (r - tau)) + tf.f(L * (r + tau))))


def _average_edges(T: float, K: float, nu_max: float, even: bool) -> np.ndarray:
    width = T / 2.0
    if nu_max > 0.0:
        width = min(width, (2.0 * math.pi / nu_max) / 16.0)
    lo = 0.0 if even else -K * T
    hi = K * T
    n_panels = int(math.ceil((hi - lo) / width))
    if n_panels > MAX_PANELS:
        raise ValueError(
            f"energy average needs {n_panels} panels (> {MAX_PANELS}); "
            "reduce T, nu_max, or the tail bound"
        )
    return np.linspace(lo, hi, n_panels + 1)


def energy_average(
    F: Callable[[np.ndarray], np.ndarray],
    wf: WeightFunction,
    T: float,
    *,
    nu_max: float,
    tail_bound: float = 1e-4,
    even: bool = False,
) -> float:
    """E_T[F] = (1/T) * integral F(tau) omega(tau/T) dtau.

    Composite fixed-width panels: at least 16 panels per period of the
    caller-declared top frequency ``nu_max``.  The domain is truncated at
    |tau| <= K*T where K comes from the weight's documented tail bound;
    the fejer weight cannot reach tight bounds and raises with a pointer
    to bspline4.  Set ``even=True`` when F is even to halve the work.
    """
    if not (T > 0.0):
        raise ValueError("T must be > 0")
    K = wf.truncation_radius(tail_bound)
    edges = _average_edges(T, K, nu_max, even)

    def g(tau):
        return np.asarray(F(tau), dtype=float) * wf.omega(tau / T) / T

    value, _ = composite_kronrod(g, edges)
    return 2.0 * value if even else value


def energy_variance_direct(
    cfg: LengthConfiguration,
    tf: TestFunction,
    wf: WeightFunction,
    L: float,
    T: float,
    *,
    abs_err_target: float = 1e-4,
) -> float:
    """Var_T of the oscillating statistic by direct quadrature over tau.

    This is the definition-side oracle for the closed-form pair functional:
    S(tau) is a finite cosine sum over winding marks, averaged and squared
    against the scaled weight.  Guarded to small mark counts and T <= 1e3;
    production evaluation goes through the pair functional instead.
    """
    if T > MAX_DIRECT_T:
        raise ValueError(f"direct variance is restricted to T <= {MAX_DIRECT_T:g}")
    _, ell, k = admissible_windings(cfg.lengths, tf.support_radius * L)
    if ell.size == 0:
        return 0.0
    if ell.size > MAX_DIRECT_MARKS:
        raise ValueError(
            f"direct variance is restricted to {MAX_DIRECT_MARKS} marks, got {ell.size}"
        )
    m = k * ell
    w = (2.0 / L) * kernel_HL(m, tf, L) / k

    sup_abs = 2.0 * float(np.sum(np.abs(w)))
    tail_bound = min(1e-5, abs_err_target / (2.0 * max(1.0, sup_abs * sup_abs)))
    K = wf.truncation_radius(tail_bound, max_radius=1e5)
    nu_max = 2.0 * float(m.max())
    edges = _average_edges(T, K, nu_max, even=True)

    # One pass accumulating E_T[1], E_T[S], E_T[S^2] on the same nodes.
    q0 = q1 = q2 = 0.0
    n_panels = edges.size - 1
    chunk = max(1, int(2_000_000 // (15 * max(1, m.size))))
    from .numerics import _XGK, _WGK  # shared rule nodes

    for start in range(0, n_panels, chunk):
        lo = edges[start : min(start + chunk, n_panels)]
        hi = edges[start + 1 : min(start + chunk, n_panels) + 1]
        center = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo)
        nodes = (center[:, None] + half[:, None] * _XGK[None, :]).ravel()
        wq = (half[:, None] * _WGK[None, :]).ravel() * wf.omega(nodes / T) / T
        s_vals = w @ np.cos(np.outer(m, nodes))
        q0 += float(np.sum(wq))
        q1 += float(np.sum(wq * s_vals))
        q2 += float(np.sum(wq * s_vals * s_vals))
    q0, q1, q2 = 2.0 * q0, 2.0 * q1, 2.0 * q2  # even integrands
    return q2 - q1 * q1


_GENUS_RE = re.compile(r"^#\s*genus\s*=\s*(\d+)\s*$")


def load_eigenvalue_file(path: str | Path) -> EigenvalueList:
    """Read spectral parameters, one r_j per line.

    The header line ``# genus=G`` is required: the smooth term needs the
    genus and silent defaults would corrupt it.
    """
    path = Path(path)
    genus: int | None = None
    values: list[float] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            match = _GENUS_RE.match(line)
            if match:
                genus = int(match.group(1))
            continue
        try:
            value = float(line)
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: not a decimal spectral parameter") from exc
        if value < 0.0 or not np.isfinite(value):
            raise ValueError(f"{path}:{lineno}: spectral parameters must be >= 0")
        values.append(value)
    if genus is None:
        raise ValueError(f"{path}: missing required header '# genus=G'")
    return EigenvalueList(r_values=np.asarray(values, dtype=float), genus=genus)
