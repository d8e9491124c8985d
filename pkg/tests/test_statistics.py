import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goevar.numerics import QuadratureSpec, integrate
from goevar.pointprocess import LengthConfiguration
from goevar.statistics import (
    EigenvalueList,
    WindowParams,
    admissible_windings,
    energy_average,
    energy_variance_direct,
    kernel_H_L_tau,
    kernel_HL,
    kernel_UT,
    load_eigenvalue_file,
    oscillating_statistic,
    smooth_term,
    spectral_count,
)
from goevar.testfuncs import WeightTruncationError, make_weight
from goevar.variance import build_marks, phi


def test_window_params():
    wp = WindowParams(L=8.0, T=math.exp(24.0))
    assert wp.is_admissible(c=1.0)  # 8 <= 24
    assert not WindowParams(L=8.0, T=10.0).is_admissible()
    with pytest.raises(ValueError):
        WindowParams(L=0.0, T=1.0)
    with pytest.raises(ValueError):
        WindowParams(L=1.0, T=1.0, tau=-1.0)


def test_kernel_HL_limit_and_support(tf21):
    assert kernel_HL(0.0, tf21, 5.0) == pytest.approx(2.0, abs=0.0)
    assert kernel_HL(5.0, tf21, 5.0) == 0.0
    assert kernel_HL(7.3, tf21, 5.0) == 0.0


def test_kernel_HL_formula_value(tf21):
    # x = L/2: (L/2)(1 - 1/4)^2 / sinh(L/4) = (9L/32)/sinh(L/4)
    for L in (4.0, 6.0, 11.0):
        expected = (9.0 * L / 32.0) / math.sinh(L / 4.0)
        assert kernel_HL(L / 2.0, tf21, L) == pytest.approx(expected, rel=1e-14)


def test_kernel_HL_high_precision(tf21):
    import mpmath

    mpmath.mp.dps = 40
    for x, L in ((0.7, 4.0), (3.9, 4.0), (13.0, 16.0)):
        exact = float(
            mpmath.mpf(x)
            * (1 - (mpmath.mpf(x) / L) ** 2) ** 2
            / mpmath.sinh(mpmath.mpf(x) / 2)
        )
        assert kernel_HL(x, tf21, L) == pytest.approx(exact, rel=1e-13)


def test_kernel_H_L_tau_support_and_terms(tf21):
    L = 4.0
    assert kernel_H_L_tau(4.5, tf21, L, 0.3) == 0.0  # beyond C0*L: empty sum
    # single admissible winding: x in (C0L/2, C0L)
    x = 3.0
    expected = (2.0 * x / L) * tf21.fhat(x / L) / math.sinh(x / 2.0)
    assert kernel_H_L_tau(x, tf21, L, 0.0) == pytest.approx(expected, rel=1e-13)
    # two-term winding sum at x = C0L/2.5
    x = L / 2.5
    tau = 0.7
    manual = sum(
        (2.0 * x / L) * tf21.fhat(k * x / L) * math.cos(k * x * tau) / math.sinh(k * x / 2.0)
        for k in (1, 2)
    )
    assert kernel_H_L_tau(x, tf21, L, tau) == pytest.approx(manual, rel=1e-13)


def test_kernel_H_L_tau_rejects_zero(tf21):
    with pytest.raises(ValueError):
        kernel_H_L_tau(0.0, tf21, 4.0, 1.0)


def test_kernel_UT_special_values(bspline4):
    T = 100.0
    assert kernel_UT(0.0, 0.0, bspline4, T) == pytest.approx(0.0, abs=1e-15)
    # Tx > 1 and 2Tx > 1 leave only the constant term 1/2.
    assert kernel_UT(0.5, 0.5, bspline4, T) == pytest.approx(0.5, abs=0.0)
    # all arguments outside the support
    assert kernel_UT(0.3, 0.5, bspline4, T) == 0.0


@settings(max_examples=150, deadline=None)
@given(
    x=st.floats(min_value=0.0, max_value=10.0),
    y=st.floats(min_value=0.0, max_value=10.0),
    T=st.floats(min_value=0.5, max_value=1e6),
)
def test_kernel_UT_symmetry_and_bound(x, y, T):
    wf = make_weight("bspline4")
    a = kernel_UT(x, y, wf, T)
    assert a == kernel_UT(y, x, wf, T)
    assert abs(a) <= 2.0  # 1/2 + 1/2 + 1 with |omegahat| <= 1


def test_oscillating_statistic_cases(tf21):
    L = 4.0
    empty = LengthConfiguration(lengths=np.array([]))
    assert oscillating_statistic(empty, tf21, L, 1.0) == 0.0
    beyond = LengthConfiguration(lengths=np.array([4.5]))
    assert oscillating_statistic(beyond, tf21, L, 1.0) == 0.0
    single = LengthConfiguration(lengths=np.array([3.0]))
    expected = (2.0 * 3.0 / L) * tf21.fhat(0.75) * math.cos(3.0) / math.sinh(1.5)
    assert oscillating_statistic(single, tf21, L, 1.0) == pytest.approx(
        expected, rel=1e-13
    )


def test_admissible_windings_edges(tf21):
    pid, ell, k = admissible_windings(np.array([]), 4.0)
    assert pid.size == ell.size == k.size == 0
    pid, ell, k = admissible_windings(np.array([1.0]), 10.0)
    assert list(k) == list(range(1, 10))  # k = 10 hits the support edge exactly
    assert np.all(ell == 1.0)


def test_smooth_term_large_tau_asymptotic(tf21):
    """g=2, L=10, tau=100: within 2% of 2 tau (g-1)/L = 20."""
    value = smooth_term(2, tf21, 10.0, 100.0)
    assert abs(value - 20.0) <= 0.02 * 20.0


def test_smooth_term_linearity_in_genus(tf21):
    v2 = smooth_term(2, tf21, 8.0, 12.0)
    v3 = smooth_term(3, tf21, 8.0, 12.0)
    assert v3 == pytest.approx(2.0 * v2, rel=1e-12)
    with pytest.raises(ValueError):
        smooth_term(1, tf21, 8.0, 12.0)


def test_spectral_count_cases(tf21):
    L = 5.0
    empty = EigenvalueList(r_values=np.array([]), genus=2)
    assert spectral_count(empty, tf21, L, 1.0) == 0.0
    single = EigenvalueList(r_values=np.array([1.0]), genus=2)
    # r = tau: f(0) + f(2 L tau)
    expected = tf21.f(0.0) + tf21.f(10.0)
    assert spectral_count(single, tf21, L, 1.0) == pytest.approx(expected, rel=1e-13)
    # f(10) against the inverse-transform quadrature oracle
    oracle = integrate(
        lambda xi: tf21.fhat(xi) * np.cos(10.0 * xi), 0.0, 1.0, QuadratureSpec(abs_tol=1e-14)
    ) / math.pi
    assert spectral_count(single, tf21, L, 1.0) == pytest.approx(
        8.0 / (15.0 * math.pi) + oracle, rel=1e-12
    )


def test_energy_average_normalization(bspline4):
    value = energy_average(
        lambda t: np.full_like(t, 3.7), bspline4, 50.0, nu_max=0.0, tail_bound=1e-6, even=True
    )
    assert value == pytest.approx(3.7, abs=3.7 * 1e-6 * 2)


def test_energy_average_cosine_identity(bspline4):
    """E_T[cos(tau x)] = omegahat(Tx) for 100 random (T, x)."""
    gen = np.random.default_rng(515)
    for _ in range(100):
        T = gen.uniform(2.0, 80.0)
        tx = gen.uniform(0.0, 2.5)
        x = tx / T
        value = energy_average(
            lambda t: np.cos(t * x), bspline4, T, nu_max=max(x, 1e-12), tail_bound=1e-8, even=True
        )
        assert abs(value - bspline4.omegahat(tx)) <= 1e-6


def test_energy_average_product_to_sum(bspline4):
    T, x, y = 9.0, 0.07, 0.04
    value = energy_average(
        lambda t: np.cos(t * x) * np.cos(t * y), bspline4, T, nu_max=x + y,
        tail_bound=1e-8, even=True,
    )
    expected = 0.5 * bspline4.omegahat(T * (x - y)) + 0.5 * bspline4.omegahat(T * (x + y))
    assert value == pytest.approx(expected, abs=1e-7)


def test_energy_average_fejer_tail_refusal(fejer):
    with pytest.raises(WeightTruncationError):
        energy_average(lambda t: np.cos(t), fejer, 10.0, nu_max=1.0, tail_bound=1e-4)


def test_energy_variance_direct_empty(tf21, bspline4):
    empty = LengthConfiguration(lengths=np.array([]))
    assert energy_variance_direct(empty, tf21, bspline4, 4.0, 50.0) == 0.0


def test_energy_variance_direct_single_mark(tf21, bspline4):
    """One mark with Tm >> 1: the variance collapses to w^2/2."""
    L, T = 4.0, 50.0
    cfg = LengthConfiguration(lengths=np.array([3.0]))
    w = (2.0 / L) * kernel_HL(3.0, tf21, L)
    value = energy_variance_direct(cfg, tf21, bspline4, L, T)
    assert value == pytest.approx(0.5 * w * w, rel=1e-5)
    assert value == pytest.approx(phi(build_marks(cfg, tf21, L), bspline4, T).total, rel=1e-5)


def test_energy_variance_direct_guards(tf21, bspline4):
    cfg = LengthConfiguration(lengths=np.array([3.0]))
    with pytest.raises(ValueError):
        energy_variance_direct(cfg, tf21, bspline4, 4.0, 5e3)
    crowded = LengthConfiguration(lengths=np.full(11, 0.004))
    with pytest.raises(ValueError):
        energy_variance_direct(crowded, tf21, bspline4, 4.0, 50.0)


def test_eigenvalue_file_requires_genus(tmp_path):
    path = tmp_path / "ev.txt"
    path.write_text("0.5\n1.5\n")
    with pytest.raises(ValueError):
        load_eigenvalue_file(path)
    path.write_text("# genus=3\n1.5\n0.5\n")
    ev = load_eigenvalue_file(path)
    assert ev.genus == 3
    assert np.array_equal(ev.r_values, np.array([0.5, 1.5]))
    path.write_text("# genus=3\n-0.5\n")
    with pytest.raises(ValueError):
        load_eigenvalue_file(path)


def test_eigenvalue_list_validation():
    with pytest.raises(ValueError):
        EigenvalueList(r_values=np.array([1.0]), genus=1)
    with pytest.raises(ValueError):
        EigenvalueList(r_values=np.array([-1.0]), genus=2)
