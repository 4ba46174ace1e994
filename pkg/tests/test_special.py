"""Tests for Bessel functions and Clebsch-Gordan coefficients."""

import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import special

from src.core.quadrature import line_rule
from src.core.special import (
    AngularMomentumTriple,
    bessel_j,
    bessel_j_over_x,
    clebsch_gordan,
    spherical_bessel_j,
)
from src.errors import DomainError, InvalidTriple

ORDERS = [0, 1, 2, 5, 10, 30, 60]
ARGS = np.array([0.0, 0.01, 0.5, 1.0, 2.5, 5.0, 10.0, 20.0, 35.0, 49.9, 50.0, 75.0, 120.0, 500.0])


def test_bessel_j_simple_values():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(3, 0.0) == 0.0
    assert abs(bessel_j(1, 3.8317059702)) < 1e-9
    assert isinstance(bessel_j(2, 1.5), float)


@pytest.mark.parametrize("order", ORDERS)
def test_bessel_j_matches_scipy(order):
    ours = bessel_j(order, ARGS)
    ref = special.jv(order, ARGS)
    assert ours.shape == ARGS.shape
    assert np.all(np.abs(ours - ref) <= 1e-12 * np.abs(ref) + 1e-14)


def test_bessel_j_negative_argument_parity():
    x = np.array([0.7, 13.0, 80.0])
    assert np.allclose(bessel_j(3, -x), -bessel_j(3, x), rtol=0, atol=0)
    assert np.allclose(bessel_j(4, -x), bessel_j(4, x), rtol=0, atol=0)


def test_bessel_recurrence_residual():
    x = np.linspace(0.1, 50.0, 200)
    for nu in range(1, 31):
        lower, mid, upper = bessel_j(nu - 1, x), bessel_j(nu, x), bessel_j(nu + 1, x)
        residual = np.abs(lower + upper - (2.0 * nu / x) * mid)
        assert np.all(residual <= 1e-10 * np.maximum(1.0, np.abs(mid)))


def test_bessel_j_domain():
    with pytest.raises(DomainError):
        bessel_j(201, 1.0)
    with pytest.raises(DomainError):
        bessel_j(2, 2.0e5)
    with pytest.raises(DomainError):
        bessel_j(-1, 1.0)


def test_bessel_j_over_x_limit_and_values():
    assert bessel_j_over_x(1, 0.0) == 0.5
    assert bessel_j_over_x(1, 1e-9) == pytest.approx(0.5, abs=1e-15)
    assert bessel_j_over_x(3, 0.0) == 0.0
    x = np.array([1e-7, 1e-3, 0.4, 7.0, 90.0])
    for order in (1, 2, 5):
        assert np.allclose(bessel_j_over_x(order, x), special.jv(order, x) / x, rtol=1e-12, atol=1e-16)
    with pytest.raises(DomainError):
        bessel_j_over_x(0, 1.0)


def test_bessel_orthogonality_integral():
    """int_0^X J_a J_b dt/t = delta_ab / (2a) for a = m+2p+1; the 1/t tail limits accuracy."""
    t, w = line_rule(1.0e4, math.pi)
    cache = {a: bessel_j(a, t) for a in range(1, 14)}
    for m in range(5):
        for p in range(5):
            for q in range(5):
                a, b = m + 2 * p + 1, m + 2 * q + 1
                value = float(np.dot(w, cache[a] * cache[b] / t))
                expected = 1.0 / (2 * a) if p == q else 0.0
                assert abs(value - expected) < 2e-3


def test_spherical_bessel_examples():
    assert spherical_bessel_j(0, 0.0) == 1.0
    assert spherical_bessel_j(3, 0.0) == 0.0
    assert abs(spherical_bessel_j(0, math.pi)) < 1e-14
    x = 1.0
    closed = ((3.0 / x**2 - 1.0) * math.sin(x) - 3.0 * math.cos(x) / x) / x
    assert spherical_bessel_j(2, 1.0) == pytest.approx(closed, abs=1e-12)


@pytest.mark.parametrize("l", [0, 1, 2, 7, 15, 40])
def test_spherical_bessel_matches_scipy(l):
    x = np.array([1e-3, 0.5, 0.99, 1.0, 2.0, 5.0, 10.0, 30.0, 80.0])
    ours = spherical_bessel_j(l, x)
    ref = special.spherical_jn(l, x)
    assert np.all(np.abs(ours - ref) <= 1e-12 * np.abs(ref) + 1e-14)


def test_spherical_bessel_domain():
    with pytest.raises(DomainError):
        spherical_bessel_j(201, 1.0)


def test_values_do_not_depend_on_batch():
    neighbours = np.array([40.0, 0.3, 95.0, 7.5, 150.0])
    for order, x in ((5, 10.0), (0, 0.8), (3, 120.0), (40, 45.0), (12, 30.0)):
        alone = bessel_j(order, np.array([x]))[0]
        assert bessel_j(order, np.concatenate(([x], neighbours)))[0] == alone
        assert bessel_j(order, np.concatenate((neighbours, [x])))[-1] == alone
        assert bessel_j_over_x(order + 1, np.concatenate(([x], neighbours)))[0] == bessel_j_over_x(order + 1, x)
    for l, x in ((7, 3.0), (0, 0.4), (2, 30.0), (40, 12.0)):
        alone = spherical_bessel_j(l, np.array([x]))[0]
        assert spherical_bessel_j(l, np.concatenate(([x], neighbours)))[0] == alone


def _cg(j1, m1, j2, m2, j3, m3):
    """Doubled-integer shorthand."""
    return clebsch_gordan(AngularMomentumTriple(j1, m1, j2, m2, j3, m3))


def test_clebsch_gordan_examples():
    assert _cg(1, 1, 1, -1, 0, 0) == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-12)
    assert _cg(1, 1, 1, 1, 2, 2) == pytest.approx(1.0, abs=1e-12)
    assert _cg(2, 0, 2, 0, 2, 0) == pytest.approx(0.0, abs=1e-15)
    # Condon-Shortley: <1/2 -1/2; 1/2 1/2 | 0 0> = -1/sqrt(2)
    assert _cg(1, -1, 1, 1, 0, 0) == pytest.approx(-1.0 / math.sqrt(2.0), abs=1e-12)


def test_clebsch_gordan_selection_rules_return_zero():
    assert _cg(2, 2, 2, 0, 2, 0) == 0.0  # m1 + m2 != m3
    assert _cg(2, 0, 2, 0, 6, 0) == 0.0  # triangle
    assert _cg(6, 0, 2, 0, 2, 0) == 0.0


def test_invalid_triple():
    with pytest.raises(InvalidTriple):
        AngularMomentumTriple(1, 0, 1, 0, 0, 0)
    with pytest.raises(InvalidTriple):
        AngularMomentumTriple(2, 4, 2, 0, 2, 0)
    with pytest.raises(InvalidTriple):
        AngularMomentumTriple(1, 1, 2, 0, 2, 0)


def test_clebsch_gordan_orthogonality():
    for tj1 in range(9):
        for tj2 in range(9):
            for tm in range(-(tj1 + tj2), tj1 + tj2 + 1, 2):
                pairs = [(m1, tm - m1) for m1 in range(-tj1, tj1 + 1, 2) if abs(tm - m1) <= tj2]
                totals = [j for j in range(abs(tj1 - tj2), tj1 + tj2 + 1, 2) if j >= abs(tm)]
                u = np.array([[_cg(tj1, m1, tj2, m2, j, tm) for m1, m2 in pairs] for j in totals])
                assert np.allclose(u @ u.T, np.eye(len(totals)), atol=1e-10)


def test_clebsch_gordan_exchange_symmetry():
    for tj1, tj2, tj3 in [(4, 6, 4), (3, 5, 4), (8, 8, 8), (7, 3, 6)]:
        for m1 in range(-tj1, tj1 + 1, 2):
            for m2 in range(-tj2, tj2 + 1, 2):
                if abs(m1 + m2) > tj3:
                    continue
                sign = -1.0 if ((tj1 + tj2 - tj3) // 2) % 2 else 1.0
                a = _cg(tj1, m1, tj2, m2, tj3, m1 + m2)
                b = _cg(tj2, m2, tj1, m1, tj3, m1 + m2)
                assert a == pytest.approx(sign * b, abs=1e-12)


def test_clebsch_gordan_large_arguments_stay_normalised():
    tj1 = tj2 = 24
    tm = 0
    column = [_cg(tj1, m1, tj2, tm - m1, 24, tm) for m1 in range(-tj1, tj1 + 1, 2)]
    assert math.fsum(c * c for c in column) == pytest.approx(1.0, abs=1e-10)


def test_clebsch_gordan_stretched_states_match_closed_form():
    # <j1 m1; j2 m2 | j1+j2 m1+m2>^2 = C(2j1, j1+m1) C(2j2, j2+m2) / C(2J, J+M)
    for tj1 in range(0, 51, 7):
        for tj2 in range(0, 51, 5):
            for m1 in range(-tj1, tj1 + 1, 2):
                for m2 in range(-tj2, tj2 + 1, 2):
                    tj3, tm = tj1 + tj2, m1 + m2
                    exact = Fraction(
                        math.comb(tj1, (tj1 + m1) // 2) * math.comb(tj2, (tj2 + m2) // 2),
                        math.comb(tj3, (tj3 + tm) // 2),
                    )
                    assert _cg(tj1, m1, tj2, m2, tj3, tm) == pytest.approx(math.sqrt(exact), rel=1e-12)


def test_clebsch_gordan_singlet_closed_form():
    for tj in range(51):
        for m in range(-tj, tj + 1, 2):
            sign = -1.0 if ((tj - m) // 2) % 2 else 1.0
            assert _cg(tj, m, tj, -m, 0, 0) == pytest.approx(sign / math.sqrt(tj + 1), rel=1e-12)


def test_clebsch_gordan_cancelling_sum_at_large_j():
    # <20 -3; 41/2 -1/2 | 49/2 -7/2>, alternating sum with many terms
    assert _cg(40, -6, 41, -1, 49, -7) == pytest.approx(-0.14255108729193047, rel=1e-12)


@pytest.mark.parametrize(("tj1", "tj2", "tm"), [(50, 50, 0), (50, 50, 14), (50, 50, -30), (49, 50, 1), (49, 50, -23)])
def test_clebsch_gordan_orthogonality_at_large_j(tj1, tj2, tm):
    pairs = [(m1, tm - m1) for m1 in range(-tj1, tj1 + 1, 2) if abs(tm - m1) <= tj2]
    totals = [j for j in range(abs(tj1 - tj2), tj1 + tj2 + 1, 2) if j >= abs(tm)]
    u = np.array([[_cg(tj1, m1, tj2, m2, j, tm) for m1, m2 in pairs] for j in totals])
    assert np.max(np.abs(u @ u.T - np.eye(len(totals)))) < 1e-12
