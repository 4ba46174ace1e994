"""Tests for the reduced density matrix, Schmidt spectrum and entanglement verdict."""

import math

import numpy as np
import pytest

from src.core.mode_index import ModeIndex, mode_count
from src.core.zernike import ZernikeExpansion
from src.errors import EigensolverFailure, InvariantViolation
from src.quantum.entanglement import (
    ENTANGLED,
    INCONCLUSIVE,
    PRODUCT,
    SPECTRUM_REPORTED,
    csb_defects,
    entanglement_report,
    entanglement_verdict,
    jacobi_eigh,
    purity,
    reduce,
    schmidt_spectrum,
)
from src.quantum.spdc import spdc_zeta
from src.quantum.states import ReducedDensityMatrix, TwoPhotonState, normalize, product_state

PISTON = ZernikeExpansion.single(ModeIndex(0, 0))


def _random_hermitian(rng, d: int) -> np.ndarray:
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return 0.5 * (a + a.conj().T)


def _random_state(rng, n_max: int) -> TwoPhotonState:
    d = mode_count(n_max)
    zeta = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return normalize(TwoPhotonState(zeta, n_max, normalized=False))


# ── eigensolver ──


def test_jacobi_matches_lapack():
    rng = np.random.default_rng(0)
    for d in (1, 2, 5, 12):
        h = _random_hermitian(rng, d)
        expected = np.sort(np.linalg.eigvalsh(h))[::-1]
        assert np.max(np.abs(jacobi_eigh(h) - expected)) < 1e-11


def test_jacobi_degenerate_and_empty():
    assert jacobi_eigh(np.zeros((0, 0))).size == 0
    values = jacobi_eigh(np.eye(4) / 4.0)
    assert np.allclose(values, 0.25, atol=1e-15)


def test_jacobi_reports_non_convergence():
    rng = np.random.default_rng(1)
    with pytest.raises(EigensolverFailure):
        jacobi_eigh(_random_hermitian(rng, 6), max_sweeps=1)


# ── reduction and purity ──


def test_piston_pump_purity_sequence():
    for n_max, expected in ((0, 1.0), (2, 1.0 / 6.0), (4, 1.0 / 15.0), (6, 1.0 / 28.0)):
        state = spdc_zeta(PISTON, n_max)
        assert purity(reduce(state)) == pytest.approx(expected, abs=1e-12)


def test_reduced_matrix_is_density_matrix():
    rng = np.random.default_rng(2)
    rho = reduce(_random_state(rng, 3))
    assert rho.trace == pytest.approx(1.0, abs=1e-12)
    assert np.array_equal(rho.xi, rho.xi.conj().T)
    assert 0.0 < purity(rho) <= 1.0 + 1e-12


def test_reduced_density_matrix_validation():
    modes = [ModeIndex(0, 0), ModeIndex(1, -1)]
    with pytest.raises(InvariantViolation):
        ReducedDensityMatrix(np.array([[0.5, 0.1], [0.3, 0.5]], dtype=complex), modes)
    with pytest.raises(InvariantViolation):
        ReducedDensityMatrix(np.eye(2, dtype=complex), modes)


# ── Schmidt spectrum ──


def test_schmidt_matches_singular_values():
    rng = np.random.default_rng(3)
    state = _random_state(rng, 2)
    spectrum = schmidt_spectrum(state)
    singular = np.linalg.svd(state.zeta, compute_uv=False)
    assert np.max(np.abs(spectrum.values - singular**2)) < 1e-12
    assert spectrum.values.sum() == pytest.approx(1.0, abs=1e-12)


def test_schmidt_number_and_entropy_of_piston_pump():
    spectrum = schmidt_spectrum(spdc_zeta(PISTON, 2))
    assert np.allclose(spectrum.values, 1.0 / 6.0, atol=1e-12)
    assert spectrum.number == pytest.approx(6.0, rel=1e-10)
    assert spectrum.entropy == pytest.approx(math.log(6.0), rel=1e-10)


def test_schmidt_of_product_state():
    rng = np.random.default_rng(4)
    d = mode_count(2)
    u = rng.normal(size=d) + 1j * rng.normal(size=d)
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    spectrum = schmidt_spectrum(product_state(u, v, 2))
    assert spectrum.values[0] == pytest.approx(1.0, abs=1e-12)
    assert spectrum.number == pytest.approx(1.0, abs=1e-10)
    assert spectrum.entropy == pytest.approx(0.0, abs=1e-9)


# ── verdict ──


def test_csb_defects_are_non_positive():
    rng = np.random.default_rng(5)
    defects = csb_defects(reduce(_random_state(rng, 3)))
    assert np.max(defects) <= 1e-12
    assert np.allclose(np.diag(defects), 0.0, atol=1e-15)


def test_product_state_verdict():
    rng = np.random.default_rng(6)
    d = mode_count(1)
    u = rng.normal(size=d) + 1j * rng.normal(size=d)
    v = rng.normal(size=d)
    result = entanglement_verdict(product_state(u, v, 1))
    assert result.verdict == PRODUCT
    assert result.purity == pytest.approx(1.0, abs=1e-12)


def test_entangled_verdict_with_witnesses():
    result = entanglement_verdict(spdc_zeta(PISTON, 2))
    assert result.verdict == ENTANGLED
    assert result.purity == pytest.approx(1.0 / 6.0)
    assert 0 < len(result.witnesses) <= 10
    defects = [w["defect"] for w in result.witnesses]
    assert defects == sorted(defects)
    assert defects[0] == pytest.approx(-1.0 / 36.0, abs=1e-12)


def test_epsilon_controls_verdict():
    # purity 1 - 2p(1-p) with p = 1e-4 sits above 1 - epsilon for epsilon = 1e-3
    p = 1e-4
    zeta = np.zeros((3, 3), dtype=complex)
    zeta[0, 0] = math.sqrt(1.0 - p)
    zeta[1, 1] = math.sqrt(p)
    state = TwoPhotonState(zeta, 1)
    result = entanglement_verdict(state, epsilon=1e-3)
    assert result.verdict == PRODUCT
    assert entanglement_verdict(state, epsilon=1e-6).verdict == ENTANGLED


def test_report_contents():
    report = entanglement_report(spdc_zeta(PISTON, 6))
    assert report["verdict"] == ENTANGLED
    assert report["purity"] == pytest.approx(1.0 / 28.0, abs=1e-12)
    assert len(report["schmidt_spectrum"]) == SPECTRUM_REPORTED
    assert report["schmidt_number"] == pytest.approx(28.0, rel=1e-9)
    assert report["epsilon"] == 1e-6
    assert report["n_max"] == 6


def _balanced_state() -> TwoPhotonState:
    zeta = np.zeros((3, 3), dtype=complex)
    zeta[1, 2] = zeta[2, 1] = math.sqrt(0.5)
    return TwoPhotonState(zeta, 1)


def test_balanced_two_term_state():
    state = _balanced_state()
    spectrum = schmidt_spectrum(state)
    assert spectrum.values[:2] == pytest.approx([0.5, 0.5], abs=1e-14)
    assert spectrum.number == pytest.approx(2.0)
    result = entanglement_verdict(state)
    assert result.verdict == ENTANGLED
    assert result.purity == pytest.approx(0.5)


def test_purity_equals_sum_of_squared_schmidt_values():
    state = spdc_zeta(ZernikeExpansion({ModeIndex(1, 1): 1.0, ModeIndex(2, 0): 0.5j}, 2), 3)
    spectrum = schmidt_spectrum(state)
    assert purity(reduce(state)) == pytest.approx(float(np.sum(spectrum.values**2)), abs=1e-10)


def test_parity_blocks_vanish_for_piston_pump():
    rho = reduce(spdc_zeta(PISTON, 2))
    for i, a in enumerate(rho.modes):
        for j, b in enumerate(rho.modes):
            if (a.m - b.m) % 2:
                assert rho.xi[i, j] == 0


def test_tilt_pump_is_entangled_with_witness():
    result = entanglement_verdict(spdc_zeta(ZernikeExpansion.single(ModeIndex(1, 1)), 3))
    assert result.verdict == ENTANGLED
    assert result.witnesses[0]["defect"] < 0.0


def test_purity_on_threshold_is_inconclusive():
    state = _balanced_state()
    p = purity(reduce(state))
    assert entanglement_verdict(state, epsilon=1.0 - p).verdict == INCONCLUSIVE


# ── pump states used across the machinery ──

PUMP_STATES = [
    ((0, 0), 2),
    ((0, 0), 3),
    ((0, 0), 4),
    ((1, 1), 2),
    ((1, 1), 5),
    ((1, 1), 8),
    ((2, 0), 2),
    ((2, 0), 4),
    ((2, 2), 2),
    ((2, 2), 4),
    ((2, 2), 6),
]


@pytest.mark.parametrize(("pump", "n_max"), PUMP_STATES)
def test_pump_state_density_matrix(pump, n_max):
    state = spdc_zeta(ZernikeExpansion.single(ModeIndex(*pump)), n_max)
    rho = reduce(state)
    assert np.max(np.abs(rho.xi - rho.xi.conj().T)) < 1e-12
    assert rho.trace == pytest.approx(1.0, abs=1e-10)
    assert np.max(csb_defects(rho)) <= 1e-10
    for i, a in enumerate(rho.modes):
        for j, b in enumerate(rho.modes):
            if (a.m - b.m) % 2:
                assert rho.xi[i, j] == 0

    result = entanglement_verdict(state)
    assert result.purity < 1.0 - 1e-6
    assert result.verdict == ENTANGLED


@pytest.mark.parametrize(("pump", "n_max"), PUMP_STATES)
def test_pump_state_schmidt_spectrum(pump, n_max):
    state = spdc_zeta(ZernikeExpansion.single(ModeIndex(*pump)), n_max)
    spectrum = schmidt_spectrum(state)
    assert spectrum.values[-1] >= -1e-10
    singular = np.linalg.svd(state.zeta, compute_uv=False)
    assert np.max(np.abs(spectrum.values - singular**2)) < 1e-9
    assert purity(reduce(state)) == pytest.approx(float(np.sum(spectrum.values**2)), abs=1e-10)


def test_jacobi_converges_on_nearly_diagonal_matrix():
    rng = np.random.default_rng(7)
    h = np.diag(np.linspace(0.5, 0.01, 20)).astype(complex) + 1e-9 * _random_hermitian(rng, 20)
    expected = np.sort(np.linalg.eigvalsh(h))[::-1]
    assert np.max(np.abs(jacobi_eigh(h) - expected)) < 1e-13
