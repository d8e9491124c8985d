"""Figure request object and the render dispatch."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

KINDS = ("convergence", "exceedance", "histogram", "offdiag-decay")


class FigureConfigError(ValueError):
    """Invalid figure request (bad kind, eps, or missing inputs)."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input logs, figure kind, output path, and parameters.

    ``eps`` is the deviation threshold used by exceedance plots; ``sigma2``
    pins the reference line where the summary file is not supplied.
    """

    kind: str
    records_path: Path
    out_path: Path
    summary_path: Path | None = None
    eps: float = 0.05
    sigma2: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise FigureConfigError(f"unknown figure kind {self.kind!r}; expected {KINDS}")
        if not (self.eps > 0.0):
            raise FigureConfigError("eps must be > 0")


def render(spec: FigureSpec):
    """Render the figure and return the aggregate table that was plotted.

    The returned aggregates are exactly the values drawn (no hidden
    transforms), so tests can recompute them independently from the CSV.
    """
    from . import convergence, exceedance, histogram, offdiag_decay

    module = {
        "convergence": convergence,
        "exceedance": exceedance,
        "histogram": histogram,
        "offdiag-decay": offdiag_decay,
    }[spec.kind]
    return module.render(spec)
