"""Shared numeric substrate.

Adaptive Gauss-Kronrod quadrature, overflow-safe hyperbolic ratios,
seedable/splittable random streams, and tabulated inverse CDFs.  Everything
here is pure given explicit inputs; random state is carried by a value type
(:class:`RngStream`) and never shared mutably.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureError",
    "BudgetError",
    "QuadratureSpec",
    "DEFAULT_QUADRATURE",
    "integrate",
    "composite_kronrod",
    "sinh_ratio",
    "RngStream",
    "poisson_draw",
    "TabulatedCdf",
    "DEFAULT_POISSON_CAP",
]

DEFAULT_POISSON_CAP = 20_000_000


class QuadratureError(RuntimeError):
    """Adaptive refinement exhausted its subdivision budget.

    Carries the best available estimate and its error bound so callers can
    decide whether the partial result is usable.
    """

    def __init__(self, message: str, estimate: float, error_bound: float):
        super().__init__(
            f"{message} (best estimate {estimate:.17g}, error bound {error_bound:.3g})"
        )
        self.estimate = estimate
        self.error_bound = error_bound


class BudgetError(RuntimeError):
    """A sampling or enumeration budget would be exceeded."""

    def __init__(self, message: str, expected: float | None = None):
        if expected is not None:
            message = f"{message} (expected size ~{expected:.4g})"
        super().__init__(message)
        self.expected = expected


_ENDPOINT_MODES = ("none", "removable-singularity-at-zero")


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerance and refinement policy for :func:`integrate`.

    ``endpoint_handling="removable-singularity-at-zero"`` declares that the
    integrand has a 0/0 form at the left endpoint whose analytic limit the
    caller supplies via ``limit_at_zero``.  The Kronrod rule is open (no
    endpoint nodes), so the limit only shields explicit evaluations at 0.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_subdivisions: int = 4000
    endpoint_handling: str = "none"

    def __post_init__(self):
        if not (self.abs_tol > 0.0):
            raise ValueError("abs_tol must be > 0")
        if not (self.rel_tol > 0.0):
            raise ValueError("rel_tol must be > 0")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.endpoint_handling not in _ENDPOINT_MODES:
            raise ValueError(f"endpoint_handling must be one of {_ENDPOINT_MODES}")


DEFAULT_QUADRATURE = QuadratureSpec()

# 15-point Kronrod extension of the 7-point Gauss rule (positive abscissae).
_XGK_HALF = np.array(
    [
        0.991455371120813,
        0.949107912342759,
        0.864864423359769,
        0.741531185599394,
        0.586087235467691,
        0.405845151377397,
        0.207784955007898,
        0.000000000000000,
    ]
)
_WGK_HALF = np.array(
    [
        0.022935322010529,
        0.063092092629979,
        0.104790010322250,
        0.140653259715525,
        0.169004726639267,
        0.190350578064785,
        0.204432940075298,
        0.209482141084728,
    ]
)
_WG_HALF = np.array(
    [
        0.129484966168870,
        0.279705391489277,
        0.381830050505119,
        0.417959183673469,
    ]
)

# Full 15-node arrays on [-1, 1], ascending.
_XGK = np.concatenate([-_XGK_HALF[:7], _XGK_HALF[::-1]])
_WGK = np.concatenate([_WGK_HALF[:7], _WGK_HALF[::-1]])
# Embedded Gauss-7 nodes sit at the odd Kronrod positions.
_WG = np.zeros(15)
_WG[1::2] = np.concatenate([_WG_HALF[:3], _WG_HALF[::-1]])

_EPS = np.finfo(float).eps


def _eval_panels(fn, lo, hi):
    """Apply the G7/K15 pair on a batch of panels.

    Returns per-panel Kronrod estimates and QUADPACK-style error estimates.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    center = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    nodes = center[:, None] + half[:, None] * _XGK[None, :]
    fy = np.asarray(fn(nodes.ravel()), dtype=float).reshape(nodes.shape)
    if not np.all(np.isfinite(fy)):
        raise QuadratureError("integrand returned a non-finite value", math.nan, math.inf)
    resk = fy @ _WGK * half
    resg = fy @ _WG * half
    resabs = np.abs(fy) @ _WGK * half
    mean = resk / (hi - lo)
    resasc = np.abs(fy - mean[:, None]) @ _WGK * half
    err = np.abs(resk - resg)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where(resasc > 0.0, scaled, err)
    err = np.maximum(err, 50.0 * _EPS * resabs)
    return resk, err


def _wrap_endpoint(fn, spec: QuadratureSpec, limit_at_zero):
    if spec.endpoint_handling != "removable-singularity-at-zero":
        return fn
    if limit_at_zero is None:
        raise ValueError(
            "removable-singularity-at-zero mode requires limit_at_zero from the caller"
        )

    def wrapped(x):
        x = np.asarray(x, dtype=float)
        at_zero = x == 0.0
        safe = np.where(at_zero, 1.0, x)
        return np.where(at_zero, limit_at_zero, np.asarray(fn(safe), dtype=float))

    return wrapped


def integrate(
    fn: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    *,
    limit_at_zero: float | None = None,
) -> float:
    """Globally adaptive integral of ``fn`` over ``(a, b)``.

    ``fn`` must accept a numpy array of abscissae and return the values
    elementwise.  Panels are bisected worst-error-first until the summed
    error estimate drops below ``max(abs_tol, rel_tol * |I|)``.

    Raises :class:`QuadratureError` (carrying the best estimate and its
    bound) if ``max_subdivisions`` splits do not reach the tolerance.
    """
    if not (a < b):
        raise ValueError("integrate requires a < b")
    fn = _wrap_endpoint(fn, spec, limit_at_zero)

    vals, errs = _eval_panels(fn, np.array([a]), np.array([b]))
    total = float(vals[0])
    total_err = float(errs[0])
    # Heap entries: (-err, tiebreak, a, b, val, err).
    counter = 0
    heap = [(-total_err, counter, a, b, total, total_err)]
    splits = 0
    while total_err > max(spec.abs_tol, spec.rel_tol * abs(total)):
        if splits >= spec.max_subdivisions:
            raise QuadratureError(
                f"no convergence after {splits} subdivisions", total, total_err
            )
        _, _, pa, pb, pval, perr = heapq.heappop(heap)
        mid = 0.5 * (pa + pb)
        if mid <= pa or mid >= pb:
            # Panel narrower than float spacing: accept its error as floor.
            heapq.heappush(heap, (0.0, counter + 1, pa, pb, pval, perr))
            counter += 1
            splits += 1
            continue
        cvals, cerrs = _eval_panels(fn, np.array([pa, mid]), np.array([mid, pb]))
        total += float(cvals.sum()) - pval
        total_err += float(cerrs.sum()) - perr
        for i, (lo2, hi2) in enumerate(((pa, mid), (mid, pb))):
            counter += 1
            heapq.heappush(
                heap, (-float(cerrs[i]), counter, lo2, hi2, float(cvals[i]), float(cerrs[i]))
            )
        splits += 1
    return total


def composite_kronrod(
    fn: Callable[[np.ndarray], np.ndarray],
    edges: np.ndarray,
    *,
    chunk: int = 65536,
) -> tuple[float, float]:
    """Non-adaptive K15 over fixed panels given by ``edges`` (ascending).

    Used where the panel width is dictated by an oscillation frequency
    rather than by local error.  Returns (value, summed error estimate).
    """
    edges = np.asarray(edges, dtype=float)
    if edges.ndim != 1 or edges.size < 2:
        raise ValueError("edges must be a 1-d array with at least two entries")
    parts: list[float] = []
    errs: list[float] = []
    for start in range(0, edges.size - 1, chunk):
        lo = edges[start : min(start + chunk, edges.size - 1)]
        hi = edges[start + 1 : min(start + chunk, edges.size - 1) + 1]
        vals, perr = _eval_panels(fn, lo, hi)
        parts.append(float(vals.sum()))
        errs.append(float(perr.sum()))
    return math.fsum(parts), math.fsum(errs)


def sinh_ratio(x, k: int):
    """sinh(x/2) / sinh(k*x/2) without overflow, for x >= 0 and k >= 1.

    Uses the exponential-difference form
    exp(-(k-1)x/2) * expm1(-x) / expm1(-kx), whose intermediates stay
    bounded for x up to ~1400.  The removable limit at x = 0 is 1/k, and
    the value is <= 1/k everywhere on the domain.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0.0):
        raise ValueError("sinh_ratio requires x >= 0")
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.exp(-0.5 * (k - 1) * x_arr) * np.expm1(-x_arr) / np.expm1(-k * x_arr)
    out = np.where(x_arr == 0.0, 1.0 / k, ratio)
    if np.isscalar(x) or x_arr.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class RngStream:
    """A named position in a family of independent random streams.

    Distinct (root_seed, stream_index) pairs yield statistically
    independent Philox streams; identical pairs reproduce bit-identical
    sequences across runs and thread counts.  Treat instances as values:
    derive one per task, never share a live generator.
    """

    root_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if self.root_seed < 0:
            raise ValueError("root_seed must be a non-negative integer")
        if self.stream_index < 0:
            raise ValueError("stream_index must be a non-negative integer")

    def generator(self) -> np.random.Generator:
        """Fresh generator positioned at the start of this stream."""
        seq = np.random.SeedSequence(entropy=(self.root_seed, self.stream_index))
        return np.random.Generator(np.random.Philox(seq))


def poisson_draw(mean: float, rng, cap: float = DEFAULT_POISSON_CAP) -> int:
    """One Poisson count with the given mean, deterministic per stream.

    ``rng`` may be an :class:`RngStream` or a live ``numpy`` Generator.
    Means above ``cap`` are refused with :class:`BudgetError` so callers
    cannot accidentally request astronomically large configurations.
    """
    if mean < 0.0:
        raise ValueError("mean must be >= 0")
    if mean > cap:
        raise BudgetError("Poisson mean exceeds the sampler budget", expected=mean)
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    return int(gen.poisson(mean))


class TabulatedCdf:
    """Monotone tabulated CDF with closed-form per-cell inversion.

    The density is modelled as linear within each grid cell, rescaled so
    every cell mass matches the quadrature value exactly; the CDF is then
    piecewise quadratic and both ``cdf`` and ``inverse`` use the same
    model, making the round trip exact to floating point.
    """

    def __init__(self, grid: np.ndarray, cdf_values: np.ndarray, density_values: np.ndarray):
        grid = np.asarray(grid, dtype=float)
        cdf_values = np.asarray(cdf_values, dtype=float)
        density_values = np.asarray(density_values, dtype=float)
        if grid.ndim != 1 or grid.size < 1:
            raise ValueError("grid must be a non-empty 1-d array")
        if np.any(np.diff(grid) <= 0.0) or grid[0] <= 0.0:
            raise ValueError("grid must be strictly increasing on (0, x_max]")
        if cdf_values.shape != grid.shape:
            raise ValueError("cdf_values must align with grid")
        if np.any(np.diff(cdf_values) < 0.0) or cdf_values[0] < 0.0:
            raise ValueError("cdf_values must be nondecreasing")
        if density_values.shape != (grid.size + 1,):
            raise ValueError("density_values must cover {0} plus the grid")
        self.grid = grid
        self.cdf_values = cdf_values
        self.density_values = density_values
        # Cell geometry: edges include the implicit left endpoint 0.
        self._edges = np.concatenate([[0.0], grid])
        self._widths = np.diff(self._edges)
        self._cell_start = np.concatenate([[0.0], cdf_values[:-1]])
        masses = np.diff(np.concatenate([[0.0], cdf_values]))
        trap = 0.5 * (density_values[:-1] + density_values[1:]) * self._widths
        with np.errstate(divide="ignore", invalid="ignore"):
            alpha = masses / trap
        # Degenerate (zero-density) cells fall back to a uniform model.
        self._alpha = np.where(trap > 0.0, alpha, 0.0)
        self._uniform = np.where(trap > 0.0, 0.0, masses / self._widths)
        self._slopes = np.diff(density_values) / self._widths

    @classmethod
    def from_density(
        cls,
        density: Callable[[np.ndarray], np.ndarray],
        x_max: float,
        n_cells: int = 4096,
    ) -> "TabulatedCdf":
        """Tabulate ``density`` on a uniform grid over (0, x_max]."""
        if x_max <= 0.0:
            raise ValueError("x_max must be > 0")
        edges = np.linspace(0.0, x_max, n_cells + 1)
        masses, _ = _eval_panels(density, edges[:-1], edges[1:])
        cdf_values = np.cumsum(masses)
        density_values = np.asarray(density(edges), dtype=float)
        return cls(edges[1:], cdf_values, density_values)

    @property
    def total_mass(self) -> float:
        return float(self.cdf_values[-1])

    def _locate(self, t):
        idx = np.searchsorted(self._edges, t, side="right") - 1
        return np.clip(idx, 0, self.grid.size - 1)

    def cdf(self, t):
        t_arr = np.asarray(t, dtype=float)
        idx = self._locate(t_arr)
        theta = np.clip(t_arr - self._edges[idx], 0.0, self._widths[idx])
        d = self.density_values[idx]
        s = self._slopes[idx]
        val = self._cell_start[idx] + self._alpha[idx] * (
            d * theta + 0.5 * s * theta * theta
        ) + self._uniform[idx] * theta
        out = np.where(t_arr <= 0.0, 0.0, np.where(t_arr >= self.grid[-1], self.total_mass, val))
        if np.isscalar(t) or t_arr.ndim == 0:
            return float(out)
        return out

    def inverse(self, u):
        """Monotone inverse of :meth:`cdf` on [0, total_mass]."""
        u_arr = np.asarray(u, dtype=float)
        if np.any(u_arr < 0.0) or np.any(u_arr > self.total_mass * (1.0 + 1e-12)):
            raise ValueError("inverse argument outside [0, total mass]")
        idx = np.searchsorted(self._cell_start, u_arr, side="right") - 1
        idx = np.clip(idx, 0, self.grid.size - 1)
        c = u_arr - self._cell_start[idx]
        d = self.density_values[idx]
        s = self._slopes[idx]
        alpha = self._alpha[idx]
        uni = self._uniform[idx]
        # Solve alpha*(d*theta + s*theta^2/2) = c via the stable root form.
        disc = np.sqrt(np.maximum(d * d + 2.0 * s * c / np.where(alpha > 0.0, alpha, 1.0), 0.0))
        denom = alpha * (d + disc)
        with np.errstate(divide="ignore", invalid="ignore"):
            theta = np.where(denom > 0.0, 2.0 * c / denom, c / np.where(uni > 0.0, uni, 1.0))
        theta = np.clip(theta, 0.0, self._widths[idx])
        out = self._edges[idx] + theta
        if np.isscalar(u) or u_arr.ndim == 0:
            return float(out)
        return out
