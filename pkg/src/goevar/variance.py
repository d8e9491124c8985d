"""Closed-form energy variance of the oscillating statistic.

Squaring the cosine sum S(tau) = sum over winding marks of w * cos(m tau)
and averaging over the energy window turns the variance into an exact
quadratic form over marks:

    phi = sum over ordered mark pairs (a, b) of  w_a w_b U_T(m_a, m_b),

where a mark is m = k * length with weight w = (2/L) H_L(m) / k.  Because
supp(omegahat) is exactly [-1, 1], the kernel U_T couples only mark pairs
within 1/T of each other (the difference term) plus pairs drawn from the
prefix of marks below 1/T (the sum and product terms).  A sliding window
over the sorted marks therefore enumerates every nonzero pair exactly; no
tolerance is involved and the cost is O(M log M + pairs) instead of O(M^2).

The *_oracle functions evaluate the same quantities as intensity-measure
integrals (first- and second-order expectation formulas), giving the
Monte Carlo side something exact to converge against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import BudgetError, QuadratureSpec, integrate, _eval_panels
from .pointprocess import LengthConfiguration, intensity_density
from .statistics import admissible_windings, kernel_HL, kernel_UT
from .testfuncs import TestFunction, WeightFunction, sigma2_goe

__all__ = [
    "MarkSet",
    "VarianceDecomposition",
    "build_marks",
    "phi",
    "phi_brute_force",
    "offdiag_abs_oracle",
    "d_term",
    "diag11_mean_oracle",
    "diag11_correction",
    "diag11_secondmoment_oracles",
]

DEFAULT_MAX_MARKS = 100_000_000

_ORACLE_QUAD = QuadratureSpec(abs_tol=1e-15, rel_tol=1e-9, max_subdivisions=20000)


@dataclass(frozen=True)
class MarkSet:
    """All admissible winding marks of a configuration, sorted by mark value.

    Arrays are aligned: mark value m = k * length, the winding k, the index
    of the originating point, and the weight w = (2/L) H_L(m) / k.  Ties in
    m are ordered by (point_id, k) so the enumeration is deterministic.
    """

    m: np.ndarray
    w: np.ndarray
    k: np.ndarray
    point_id: np.ndarray
    L: float
    support: float  # C0 * L; every mark satisfies m < support

    def __len__(self) -> int:
        return int(self.m.size)

    def scaled(self, c: float) -> "MarkSet":
        """Same marks with every weight multiplied by c (for bilinearity checks)."""
        return MarkSet(
            m=self.m, w=self.w * c, k=self.k, point_id=self.point_id,
            L=self.L, support=self.support,
        )


@dataclass(frozen=True)
class VarianceDecomposition:
    """phi split by pair type.

    diag11: same point, both windings 1.  diag_tail: same point, winding
    pair (k1, k2) != (1, 1) (so k1 + k2 >= 3).  offdiag: distinct points
    (ordered pairs, both orders counted).  total is the compensated sum of
    the three parts, so closure is exact by construction.
    """

    total: float
    diag11: float
    diag_tail: float
    offdiag: float
    pairs_evaluated: int


_ZERO_DECOMPOSITION = VarianceDecomposition(0.0, 0.0, 0.0, 0.0, 0)


def build_marks(
    cfg: LengthConfiguration,
    tf: TestFunction,
    L: float,
    max_marks: int = DEFAULT_MAX_MARKS,
) -> MarkSet:
    """Enumerate all (point, winding) marks with m < C0*L, sorted by m.

    The winding cutoff is exact: k ranges over k * length < C0 * L, the
    support of fhat, so no admissible pair is dropped and no zero-weight
    tail is enumerated (a mark exactly at the support edge has weight 0
    and is excluded).
    """
    if not (L > 0.0):
        raise ValueError("L must be > 0")
    support = tf.support_radius * L
    lengths = cfg.lengths
    if lengths.size:
        expected = float(np.sum(np.maximum(np.ceil(support / lengths) - 1.0, 0.0)))
        if expected > max_marks:
            raise BudgetError("mark count exceeds the budget", expected=expected)
    point_id, ell, k = admissible_windings(lengths, support)
    m = k * ell
    w = (2.0 / L) * kernel_HL(m, tf, L) / k
    order = np.lexsort((k, point_id, m))
    return MarkSet(
        m=np.ascontiguousarray(m[order]),
        w=np.ascontiguousarray(w[order]),
        k=np.ascontiguousarray(k[order]),
        point_id=np.ascontiguousarray(point_id[order]),
        L=float(L),
        support=float(support),
    )


def _prefix_terms(marks: MarkSet, wf: WeightFunction, T: float):
    """Sum- and product-kernel contributions: pairs with both marks <= 1/T.

    omegahat(T(x+y)) and omegahat(Tx)omegahat(Ty) vanish unless both
    arguments are at most 1/T, so evaluating them on the prefix block is
    exact.  Returns per-bucket term lists and the pair count.
    """
    P = int(np.searchsorted(marks.m, 1.0 / T, side="right"))
    if P == 0:
        return [], [], [], 0
    m = marks.m[:P]
    w = marks.w[:P]
    kk = marks.k[:P]
    pid = marks.point_id[:P]
    ww = np.outer(w, w)
    kernel = 0.5 * wf.omegahat(T * (m[:, None] + m[None, :])) - np.outer(
        wf.omegahat(T * m), wf.omegahat(T * m)
    )
    terms = ww * kernel
    same_point = pid[:, None] == pid[None, :]
    is_11 = np.logical_and.outer(kk == 1, kk == 1)
    eye = np.eye(P, dtype=bool)
    diag11_mask = eye & is_11
    diag_tail_mask = same_point & ~diag11_mask
    off_mask = ~same_point
    return (
        [float(x) for x in terms[diag11_mask]],
        [float(x) for x in terms[diag_tail_mask]],
        [float(x) for x in terms[off_mask]],
        P * P,
    )


def phi(marks: MarkSet, wf: WeightFunction, T: float) -> VarianceDecomposition:
    """Exact pair functional over the complete set of kernel-coupled pairs.

    Pass (i): sliding window over sorted marks finds every ordered pair
    with |m_a - m_b| <= 1/T (including a = b) for the difference kernel.
    Pass (ii): the prefix of marks below 1/T contributes the sum and
    product kernels.  Buckets are accumulated in sorted-mark order with
    exact (fsum) summation so results are independent of threading and
    chunking.
    """
    if not (T > 0.0):
        raise ValueError("T must be > 0")
    M = len(marks)
    if M == 0:
        return _ZERO_DECOMPOSITION
    m, w, kk, pid = marks.m, marks.w, marks.k, marks.point_id
    window = 1.0 / T

    lo = np.searchsorted(m, m - window, side="left")
    hi = np.searchsorted(m, m + window, side="right")
    pairs = int(np.sum(hi - lo))

    # Self pairs: U_T's difference term at 0 is omegahat(0)/2 = 1/2.
    self_terms = 0.5 * w * w
    diag11_parts = [float(x) for x in self_terms[kk == 1]]
    diag_tail_parts = [float(x) for x in self_terms[kk != 1]]
    off_parts: list[float] = []

    cross = np.nonzero(hi - lo > 1)[0]
    for a in cross:
        sl = slice(lo[a], hi[a])
        mb = m[sl]
        tb = w[a] * w[sl] * (0.5 * wf.omegahat(T * (m[a] - mb)))
        same = pid[sl] == pid[a]
        same[a - lo[a]] = False  # a's own pairing was counted above
        off_b = ~same
        off_b[a - lo[a]] = False
        if np.any(same):
            diag_tail_parts.append(float(np.sum(tb[same])))
        if np.any(off_b):
            off_parts.append(float(np.sum(tb[off_b])))

    p11, ptail, poff, prefix_pairs = _prefix_terms(marks, wf, T)
    diag11 = math.fsum(diag11_parts + p11)
    diag_tail = math.fsum(diag_tail_parts + ptail)
    offdiag = math.fsum(off_parts + poff)
    total = math.fsum((diag11, diag_tail, offdiag))
    return VarianceDecomposition(
        total=total,
        diag11=diag11,
        diag_tail=diag_tail,
        offdiag=offdiag,
        pairs_evaluated=pairs + prefix_pairs,
    )


def phi_brute_force(marks: MarkSet, wf: WeightFunction, T: float) -> VarianceDecomposition:
    """O(M^2) reference: every ordered pair through the full kernel.

    Independent of the window enumeration; used to certify it.  Buckets
    are fsum'd, so agreement at the 1e-12 absolute level is meaningful.
    """
    M = len(marks)
    if M == 0:
        return _ZERO_DECOMPOSITION
    m, w, kk, pid = marks.m, marks.w, marks.k, marks.point_id
    terms = np.outer(w, w) * kernel_UT(m[:, None], m[None, :], wf, T)
    same_point = pid[:, None] == pid[None, :]
    eye = np.eye(M, dtype=bool)
    diag11_mask = eye & np.logical_and.outer(kk == 1, kk == 1)
    diag_tail_mask = same_point & ~diag11_mask
    off_mask = ~same_point
    diag11 = math.fsum(terms[diag11_mask].tolist())
    diag_tail = math.fsum(terms[diag_tail_mask].tolist())
    offdiag = math.fsum(terms[off_mask].tolist())
    return VarianceDecomposition(
        total=math.fsum((diag11, diag_tail, offdiag)),
        diag11=diag11,
        diag_tail=diag_tail,
        offdiag=offdiag,
        pairs_evaluated=M * M,
    )


# Gauss-Legendre 15-point rule on [0, 1], used for the inner window integral.
_GL_X, _GL_W = np.polynomial.legendre.leggauss(15)
_GL_X01 = 0.5 * (_GL_X + 1.0)
_GL_W01 = 0.5 * _GL_W
# omegahat of both families is piecewise polynomial with breaks at these points.
_U_BREAKS = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])


def _inner_window_integral(
    m: np.ndarray, k2: int, tf: TestFunction, wf: WeightFunction, L: float, T: float
) -> np.ndarray:
    """integral over y of |H_L(k2 y)| |U_T(m, k2 y)| d nu(y), vectorized in m.

    The kernel support confines k2*y to [m - 1/T, m + 1/T]; substituting
    u = T(k2 y - m) in [-1, 1] makes the window O(1).  Fixed Gauss panels
    between the breakpoints of omegahat integrate the piecewise-polynomial
    kernel essentially exactly (the other factors vary on scale 1, not 1/T).
    """
    nodes = np.concatenate(
        [
            _U_BREAKS[i] + (_U_BREAKS[i + 1] - _U_BREAKS[i]) * _GL_X01
            for i in range(_U_BREAKS.size - 1)
        ]
    )
    weights = np.concatenate(
        [(_U_BREAKS[i + 1] - _U_BREAKS[i]) * _GL_W01 for i in range(_U_BREAKS.size - 1)]
    )
    arg = m[:, None] + nodes[None, :] / T  # = k2 * y
    valid = arg > 0.0
    arg_safe = np.where(valid, arg, 1.0)
    vals = (
        np.abs(kernel_HL(arg_safe, tf, L))
        * np.abs(kernel_UT(m[:, None], arg_safe, wf, T))
        * intensity_density(arg_safe / k2)
    )
    vals = np.where(valid, vals, 0.0)
    return (vals @ weights) / (k2 * T)


def offdiag_abs_oracle(
    tf: TestFunction,
    wf: WeightFunction,
    L: float,
    T: float,
    k_max: int = 6,
    spec: QuadratureSpec | None = None,
) -> float:
    """Expected sum of |w_a w_b U_T| over pairs of marks from distinct points.

    Second-order expectation formula for the Poisson process: a double
    intensity integral per winding pair (k1, k2), truncated at k_max (terms
    decay like 1/(k1^2 k2^2); k_max = 6 leaves a tail of order a percent).
    The y-integral is collapsed onto the kernel window around k1*x, which
    is exact because U_T vanishes outside it.
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    if spec is None:
        spec = QuadratureSpec(abs_tol=1e-16, rel_tol=1e-8, max_subdivisions=20000)
    c0l = tf.support_radius * L
    total = 0.0
    for k1 in range(1, k_max + 1):
        for k2 in range(1, k_max + 1):
            def outer(xs, k1=k1, k2=k2):
                xs = np.atleast_1d(np.asarray(xs, dtype=float))
                inner = _inner_window_integral(k1 * xs, k2, tf, wf, L, T)
                return (
                    np.abs(kernel_HL(k1 * xs, tf, L)) * intensity_density(xs) * inner
                )

            part = integrate(outer, 0.0, c0l / k1, spec)
            total += (4.0 / (L * L * k1 * k2)) * part
    return total


def d_term(
    k1: int,
    k2: int,
    tf: TestFunction,
    wf: WeightFunction,
    L: float,
    T: float,
    spec: QuadratureSpec | None = None,
) -> float:
    """Expected same-point winding-pair term

    (4/L^2) integral |H_L(k1 x) H_L(k2 x)| / (k1 k2) |U_T(k1 x, k2 x)| d nu(x)

    by the first-order expectation formula.  For k1 != k2 the kernel
    support restricts x to (0, 1/(|k1-k2| T)], which is passed to the
    quadrature explicitly so the window cannot be missed.
    """
    if k1 < 1 or k2 < 1:
        raise ValueError("windings must be >= 1")
    if spec is None:
        spec = QuadratureSpec(abs_tol=1e-16, rel_tol=1e-8, max_subdivisions=20000)
    c0l = tf.support_radius * L
    x_hi = c0l / max(k1, k2)
    if k1 != k2:
        x_hi = min(x_hi, 1.0 / (abs(k1 - k2) * T))
    if x_hi <= 0.0:
        return 0.0

    def integrand(xs):
        xs = np.asarray(xs, dtype=float)
        return (
            (4.0 / (L * L * k1 * k2))
            * np.abs(kernel_HL(k1 * xs, tf, L) * kernel_HL(k2 * xs, tf, L))
            * np.abs(kernel_UT(k1 * xs, k2 * xs, wf, T))
            * intensity_density(xs)
        )

    return integrate(integrand, 0.0, x_hi, spec)


def diag11_correction(
    tf: TestFunction, wf: WeightFunction, L: float, T: float
) -> float:
    """Finite-T part of the expected (1,1) diagonal term:

    4 * integral fhat(y)^2 y (omegahat(2TLy) - 2 omegahat(TLy)^2) dy.

    Substituting v = T*L*y confines the integrand to v <= 1, so the value
    is exactly a weight-dependent constant divided by (TL)^2; it vanishes
    like 1/(TL) or faster as the window sharpens.
    """
    tl = T * L

    def integrand(vs):
        vs = np.asarray(vs, dtype=float)
        y = vs / tl
        return tf.fhat(y) ** 2 * vs * (
            wf.omegahat(2.0 * vs) - 2.0 * wf.omegahat(vs) ** 2
        )

    value = integrate(integrand, 0.0, 1.0, _ORACLE_QUAD)
    return 4.0 * value / (tl * tl)


def diag11_mean_oracle(
    tf: TestFunction, wf: WeightFunction, L: float, T: float
) -> float:
    """Expected (1,1)-diagonal: the GOE target plus the finite-T correction.

    First-order expectation of (4/L^2) sum H_L(x)^2 U_T(x, x): after the
    change of variables the leading term is exactly 2*integral |y| fhat^2,
    i.e. the GOE variance of the test function.
    """
    return sigma2_goe(tf) + diag11_correction(tf, wf, L, T)


def diag11_secondmoment_oracles(
    tf: TestFunction, wf: WeightFunction, L: float, T: float
) -> tuple[float, float]:
    """Second-moment pieces of the (1,1) diagonal term.

    Returns (same-point fourth-moment integral, squared first moment):
    the first is (16/L^4) integral H_L^4 U_T(x,x)^2 d nu — the variance of
    the diagonal statistic, decaying like 1/L^4 — and the second is the
    distinct-point product, which is exactly the squared mean.
    """
    c0l = tf.support_radius * L

    def integrand(xs):
        xs = np.asarray(xs, dtype=float)
        u_diag = kernel_UT(xs, xs, wf, T)
        return (
            (16.0 / L**4)
            * kernel_HL(xs, tf, L) ** 4
            * u_diag
            * u_diag
            * intensity_density(xs)
        )

    fourth = integrate(integrand, 0.0, c0l, _ORACLE_QUAD)
    mean = diag11_mean_oracle(tf, wf, L, T)
    return fourth, mean * mean
