"""Pencil eigenvalues: closed forms, numeric root finding, adjoint mirror."""

import numpy as np
import pytest

from planeangle.pencil import (
    PoissonPencilProblem,
    UnsupportedRegime,
    adjoint_eigenvalues_numeric,
    adjoint_transmission_characteristic,
    characteristic_value,
    eigenvalues_closed_form,
    eigenvalues_numeric,
    find_zeros,
    line_is_eigenvalue_free,
    solvability_report,
)

B1 = np.pi / 6
P_DIR = PoissonPencilProblem(0.0, 0.0, B1, B1 + np.pi)  # opening pi, alpha+beta=0
P_MIX = PoissonPencilProblem(0.6, 0.4, B1, B1 + np.pi)  # alpha+beta=1


def factorized(p, lam):
    return -2.0 * np.sinh(2.0 * lam * p.d) - 2.0 * (p.alpha + p.beta) * np.sinh(
        lam * p.d
    )


def test_characteristic_zero_at_pi_over_d():
    lam = 1j * np.pi / P_MIX.d
    scale = 1.0 + abs(P_MIX.alpha) + abs(P_MIX.beta)
    assert abs(characteristic_value(P_MIX, lam)) <= 1e-12 * scale


def test_characteristic_zero_at_first_dirichlet_eigenvalue():
    assert abs(characteristic_value(P_DIR, 1j)) <= 1e-12


def test_characteristic_nonzero_on_real_axis():
    assert abs(characteristic_value(P_DIR, 0.5)) > 1e-6


def test_factorized_determinant_identity():
    rng = np.random.default_rng(42)
    for p in (P_DIR, P_MIX, PoissonPencilProblem(-0.8, 0.3, 0.4, 2.9)):
        lam = rng.uniform(-3, 3, 120) + 1j * rng.uniform(-3, 3, 120)
        for z in lam:
            raw = characteristic_value(p, z, scaled=False)
            ref = factorized(p, z)
            scale = max(abs(ref), 1.0)
            assert abs(raw - ref) <= 1e-10 * scale


def test_closed_form_dirichlet_family():
    eig = eigenvalues_closed_form(P_DIR, (-3.5, 3.5))
    expected = np.array([-3j, -2j, -1j, 1j, 2j, 3j])
    assert len(eig.values) == 6
    assert np.allclose(eig.values, expected, atol=1e-14)


def test_closed_form_mixed_family():
    # alpha=0.6, beta=0.4: 2*arctan(sqrt(3)) = 2*pi/3, so with opening pi the
    # positive imaginary parts are 4/3, 2, 8/3, 4, ...
    eig = eigenvalues_closed_form(P_MIX, (0.0, 4.0))
    expected = 1j * np.array([4.0 / 3.0, 2.0, 8.0 / 3.0, 4.0])
    assert np.allclose(eig.values, expected, atol=1e-12)


def test_closed_form_rejects_large_coupling():
    p = PoissonPencilProblem(1.5, 1.5, B1, B1 + np.pi)
    with pytest.raises(UnsupportedRegime):
        eigenvalues_closed_form(p, (-1.0, 1.0))


def test_numeric_matches_closed_form_mixed():
    closed = eigenvalues_closed_form(P_MIX, (0.1, 4.1))
    numeric = eigenvalues_numeric(P_MIX, (-0.1, 0.1, 0.1, 4.1))
    assert len(numeric.values) == len(closed.values)
    for z in closed.values:
        assert np.min(np.abs(numeric.values - z)) <= 1e-8


def test_numeric_single_root_window():
    numeric = eigenvalues_numeric(P_DIR, (-0.3, 0.3, 0.5, 1.5))
    assert len(numeric.values) == 1
    assert abs(numeric.values[0] - 1j) <= 1e-10


def test_numeric_empty_off_axis_window():
    numeric = eigenvalues_numeric(P_MIX, (2.0, 3.0, -0.5, 0.5))
    assert len(numeric.values) == 0


def test_find_zeros_polynomial_control():
    # independent sanity check of the root finder on a known function
    roots = find_zeros(lambda z: (z - 1.0) * (z + 1j) * (z - 0.5 + 0.5j), (-2, 2, -2, 2))
    expected = [1.0, -1j, 0.5 - 0.5j]
    assert len(roots) == 3
    for w in expected:
        assert min(abs(r - w) for r in roots) <= 1e-10


def test_adjoint_mirror_of_primal_zeros():
    primal = eigenvalues_numeric(P_MIX, (-0.2, 0.2, -3.0, 3.0))
    adj = adjoint_eigenvalues_numeric(P_MIX, (-0.2, 0.2, -3.0, 3.0))
    assert len(adj.values) == len(primal.values)
    mirrored = np.conj(primal.values)
    for z in mirrored:
        assert np.min(np.abs(adj.values - z)) <= 1e-8


def test_adjoint_nonzero_on_real_axis():
    for x in (0.5, 1.0, 2.0, -1.5):
        assert abs(adjoint_transmission_characteristic(P_MIX, x)) > 1e-8


def test_line_zero_is_free():
    cert = line_is_eigenvalue_free(P_MIX, 0.0)
    assert cert.free
    assert cert.distance > 0.5


def test_line_hitting_eigenvalue():
    cert = line_is_eigenvalue_free(P_DIR, np.pi / P_DIR.opening)
    assert not cert.free
    assert cert.distance <= 1e-9


def test_line_between_eigenvalues():
    cert = line_is_eigenvalue_free(P_DIR, 0.5 * np.pi / P_DIR.opening)
    assert cert.free


def test_solvability_weight_one_plus_l():
    for l in (0, 1, 2):
        report = solvability_report(P_MIX, 1.0 + l, l)
        assert report.solvable
        assert report.line == 0.0


def test_solvability_blocked_line():
    report = solvability_report(P_DIR, 3.0, 1.0)  # h = 1 hits lambda = i
    assert not report.solvable


def test_solvability_fractional_line():
    report = solvability_report(P_DIR, 2.5, 1.0)  # h = 0.5, between eigenvalues
    assert report.solvable
