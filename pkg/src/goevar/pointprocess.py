"""Poisson model of the primitive geodesic length spectrum.

The large-genus limit of the primitive length spectrum of a random
hyperbolic surface is a Poisson point process on (0, infinity) with
intensity density 2 sinh^2(t/2)/t (the Mirzakhani-Petri law).  This module
provides that intensity, a truncated inverse-CDF sampler producing
:class:`LengthConfiguration` realizations, and the first- and second-order
expectation oracles (Campbell's formula and the m=2 factorial moment).

Truncation is exact for every statistic in this package: the kernels all
vanish on lengths beyond C0*L, so sampling on (0, x_max] with
x_max >= C0*L reproduces the statistic's distribution with no bias.  The
full intensity has infinite mass, hence the mandatory cutoff and budget.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from .numerics import (
    BudgetError,
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    RngStream,
    TabulatedCdf,
    integrate,
    poisson_draw,
)

__all__ = [
    "intensity_density",
    "intensity_mass",
    "IntensityMeasure",
    "SamplerBudget",
    "LengthConfiguration",
    "sample",
    "campbell_oracle",
    "factorial_moment2_oracle",
    "load_length_file",
    "save_length_file",
]

DEFAULT_MAX_EXPECTED_POINTS = 20_000_000
DEFAULT_MAX_X_MAX = 24.0


def intensity_density(t):
    """Intensity density 2 sinh^2(t/2)/t, with the removable value 0 at t=0.

    Equivalent to (cosh t - 1)/t; the sinh form stays fully accurate near 0
    because library sinh is exact to a few ulp for small arguments.
    """
    t_arr = np.asarray(t, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = 2.0 * np.sinh(0.5 * t_arr) ** 2 / t_arr
    out = np.where(t_arr == 0.0, 0.0, val)
    if np.isscalar(t) or t_arr.ndim == 0:
        return float(out)
    return out


def intensity_mass(x_max: float, spec: QuadratureSpec | None = None) -> float:
    """Total intensity mass on (0, x_max] by quadrature.

    Grows like exp(x_max)/(2 x_max); near zero it behaves like x_max^2/4.
    """
    if not (x_max > 0.0):
        raise ValueError("x_max must be > 0")
    if spec is None:
        spec = QuadratureSpec(
            abs_tol=1e-12,
            rel_tol=1e-10,
            endpoint_handling="removable-singularity-at-zero",
        )
    return integrate(intensity_density, 0.0, x_max, spec, limit_at_zero=0.0)


@dataclass(frozen=True)
class SamplerBudget:
    """Guards against configurations too large to hold or enumerate.

    The defaults keep one replicate under about a second and a gigabyte;
    the expected point count at the cutoff is what actually binds.
    """

    max_expected_points: float = DEFAULT_MAX_EXPECTED_POINTS
    max_x_max: float = DEFAULT_MAX_X_MAX

    def __post_init__(self):
        if self.max_expected_points <= 0 or self.max_x_max <= 0:
            raise ValueError("budget limits must be positive")


@dataclass(frozen=True)
class IntensityMeasure:
    """Truncated intensity on (0, x_max] with a tabulated CDF for sampling."""

    x_max: float
    total_mass: float
    cdf: TabulatedCdf

    density = staticmethod(intensity_density)

    @classmethod
    def build(cls, x_max: float, n_cells: int = 4096) -> "IntensityMeasure":
        if not (x_max > 0.0):
            raise ValueError("x_max must be > 0")
        cdf = TabulatedCdf.from_density(intensity_density, x_max, n_cells=n_cells)
        return cls(x_max=float(x_max), total_mass=cdf.total_mass, cdf=cdf)

    def mass(self, a: float, b: float) -> float:
        """Intensity of the interval (a, b] within the truncation."""
        return float(self.cdf.cdf(b) - self.cdf.cdf(a))


@dataclass(frozen=True)
class LengthConfiguration:
    """A finite multiset of positive lengths: one realization of the process
    (or an ingested spectrum).

    ``lengths`` is sorted ascending.  ``source`` records provenance, either
    sampling parameters or the ingested file path; ``genus`` is only set
    for ingested spectra that declare it.
    """

    lengths: np.ndarray
    source: str = "unspecified"
    genus: int | None = None

    def __post_init__(self):
        arr = np.asarray(self.lengths, dtype=float)
        if arr.ndim != 1:
            raise ValueError("lengths must be one-dimensional")
        if arr.size and not np.all(arr > 0.0):
            raise ValueError("lengths must be strictly positive")
        if arr.size and np.any(np.diff(arr) < 0.0):
            arr = np.sort(arr)
        object.__setattr__(self, "lengths", arr)

    @property
    def count(self) -> int:
        return int(self.lengths.size)

    def restricted(self, x_max: float) -> "LengthConfiguration":
        """The sub-configuration of lengths <= x_max."""
        return LengthConfiguration(
            lengths=self.lengths[self.lengths <= x_max],
            source=f"{self.source}|restricted<= {x_max:g}",
            genus=self.genus,
        )


def sample(
    nu: IntensityMeasure,
    rng: RngStream,
    budget: SamplerBudget = SamplerBudget(),
) -> LengthConfiguration:
    """Draw one realization of the truncated Poisson process.

    The count is Poisson(total mass); positions are i.i.d. by inverse CDF.
    Refuses (with the estimated expected count) when the budget is
    exceeded, since the expected count grows like exp(x_max)/(2 x_max).
    """
    if nu.x_max > budget.max_x_max:
        raise BudgetError(
            f"x_max {nu.x_max:g} exceeds the budget limit {budget.max_x_max:g}",
            expected=nu.total_mass,
        )
    if nu.total_mass > budget.max_expected_points:
        raise BudgetError(
            "expected point count exceeds the sampler budget",
            expected=nu.total_mass,
        )
    gen = rng.generator()
    n = poisson_draw(nu.total_mass, gen, cap=budget.max_expected_points)
    # (1 - U) maps [0,1) draws onto (0, mass], keeping every length positive.
    u = (1.0 - gen.random(n)) * nu.total_mass
    points = np.sort(nu.cdf.inverse(u))
    return LengthConfiguration(
        lengths=points,
        source=f"sampled(seed={rng.root_seed},stream={rng.stream_index},x_max={nu.x_max:g})",
    )


def campbell_oracle(
    h: Callable[[np.ndarray], np.ndarray],
    nu: IntensityMeasure,
    spec: QuadratureSpec | None = None,
) -> float:
    """E[sum over points of h] = integral of h against the intensity."""
    if spec is None:
        spec = DEFAULT_QUADRATURE
    return integrate(
        lambda t: np.asarray(h(t), dtype=float) * intensity_density(t),
        0.0,
        nu.x_max,
        spec,
    )


def factorial_moment2_oracle(
    h: Callable[[np.ndarray, np.ndarray], np.ndarray],
    nu: IntensityMeasure,
    spec: QuadratureSpec | None = None,
) -> float:
    """E[sum over ordered pairs of distinct points of h(x, y)].

    For a Poisson process this is the plain product-measure double
    integral; the diagonal carries no mass so no exclusion is needed.
    ``h`` must broadcast over numpy arrays in both arguments.
    """
    if spec is None:
        spec = QuadratureSpec(abs_tol=1e-10, rel_tol=1e-8)

    def outer(xs):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        inner_vals = np.empty_like(xs)
        for i, x in enumerate(xs):
            inner_vals[i] = integrate(
                lambda y, x=x: np.asarray(h(x, y), dtype=float) * intensity_density(y),
                0.0,
                nu.x_max,
                spec,
            )
        return inner_vals * intensity_density(xs)

    return integrate(outer, 0.0, nu.x_max, spec)


_GENUS_RE = re.compile(r"^#\s*genus\s*=\s*(\d+)\s*$")


def load_length_file(path: str | Path) -> LengthConfiguration:
    """Read a plain-text spectrum: one positive decimal length per line.

    An optional header line ``# genus=G`` records the genus; other ``#``
    lines are comments.  Raises ValueError on malformed or non-positive
    entries.
    """
    path = Path(path)
    genus: int | None = None
    values: list[float] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _GENUS_RE.match(line)
            if m:
                genus = int(m.group(1))
            continue
        try:
            value = float(line)
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: not a decimal length: {line!r}") from exc
        if not (value > 0.0) or not np.isfinite(value):
            raise ValueError(f"{path}:{lineno}: lengths must be positive, got {line!r}")
        values.append(value)
    return LengthConfiguration(
        lengths=np.sort(np.asarray(values, dtype=float)),
        source=f"ingested({path})",
        genus=genus,
    )


def save_length_file(cfg: LengthConfiguration, path: str | Path) -> None:
    """Write a configuration in the ingestion format (sorted, full precision)."""
    path = Path(path)
    lines = []
    if cfg.genus is not None:
        lines.append(f"# genus={cfg.genus}")
    lines.extend(f"{x!r}" for x in cfg.lengths.tolist())
    path.write_text("\n".join(lines) + "\n")
