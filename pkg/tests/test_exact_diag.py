import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rtsym.exact_diag import (
    SingularMixingError,
    diagonalize,
    drive_coefficients,
    h1_phase_substitution,
    interior_max_deviation,
    mixing_angle,
    mode_mix,
)
from rtsym.fock import FockSpace, identity_op, zero_op
from rtsym.hamiltonians import build_h1, build_h2
from rtsym.spectral import analytic_spectrum

SPACE = FockSpace(2, 8)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(0.0, 2.5))
def test_mixing_angle_identities(g, ratio):
    kappa = g * ratio
    if abs(kappa - g) < 1e-3:
        return
    m = mixing_angle(g, kappa)
    assert abs(m.cos_half**2 + m.sin_half**2 - 1) <= 1e-12
    assert abs(2 * m.sin_half * m.cos_half * m.lam - g) <= 1e-10 * g
    assert abs((m.cos_half**2 - m.sin_half**2) * m.lam + 1j * kappa) <= 1e-10 * g


def test_mixing_angle_singular():
    with pytest.raises(SingularMixingError):
        mixing_angle(1.0, 1.0)


def test_eigenmodes_obey_canonical_commutators():
    ops = mode_mix(SPACE, mixing_angle(1.0, 0.4))
    comms = ops.commutators()
    inner = SPACE.interior_indices(1)
    one = identity_op(SPACE).block(inner)
    np.testing.assert_allclose(comms["[c,c+]"].block(inner), one, atol=1e-12)
    np.testing.assert_allclose(comms["[d,d+]"].block(inner), one, atol=1e-12)
    np.testing.assert_allclose(comms["[c,d+]"].block(inner), 0, atol=1e-12)


def test_drive_coefficients_sum_rule():
    m = mixing_angle(1.0, 0.5)
    c = drive_coefficients(0.2, m)
    assert abs(c.eps_c**2 + c.eps_d**2 - 2 * 0.04) <= 1e-14


@pytest.mark.parametrize("model,builder", [("h1", build_h1), ("h2", build_h2)])
@pytest.mark.parametrize("kappa", [0.0, 0.4, 0.8, 1.3])
def test_reconstruction(model, builder, kappa):
    g, eps = 1.0, 0.15
    form = diagonalize(SPACE, g, kappa, eps, model)
    assert interior_max_deviation(form.operator(), builder(SPACE, g, eps, kappa), 1) <= 1e-9


@pytest.mark.parametrize("kappa", [0.2, 0.7, 1.5])
def test_levels_match_closed_form(kappa):
    form = diagonalize(SPACE, 1.0, kappa, 0.1)
    an = analytic_spectrum(1.0, kappa, 0.1)
    for n in (-1, 0, 1):
        assert abs(form.level(n) - an.levels[n]) <= 1e-12


def test_undriven_displacement_is_trivial():
    form = diagonalize(SPACE, 1.0, 0.3, 0.0)
    assert (form.displaced.c - form.modes.c).allclose(zero_op(SPACE))
    assert form.lam0 == 0


def test_bad_model():
    with pytest.raises(ValueError):
        diagonalize(SPACE, 1.0, 0.3, 0.1, "h3")


def test_hermitian_limit():
    ops = mode_mix(SPACE, mixing_angle(1.0, 0.0))
    assert ops.c_plus.allclose(ops.c.adjoint(), atol=1e-15)
    m = mixing_angle(1.0, 0.6)
    assert m.sin_half == pytest.approx(np.sqrt((0.8 + 0.6j) / 1.6))


def test_drive_coefficient_examples():
    c0 = drive_coefficients(0.1, mixing_angle(1.0, 0.0))
    assert c0.eps_c == pytest.approx(0.1 * np.sqrt(2)) and abs(c0.eps_d) < 1e-15
    c = drive_coefficients(0.1, mixing_angle(1.0, 0.6))
    assert c.eps_c**2 - c.eps_d**2 == pytest.approx(0.025, abs=1e-14)


def test_phase_substitution_twice_negates():
    ops = mode_mix(SPACE, mixing_angle(1.0, 0.3))
    twice = h1_phase_substitution(h1_phase_substitution(ops))
    for x, y in ((twice.c, ops.c), (twice.c_plus, ops.c_plus), (twice.d, ops.d), (twice.d_plus, ops.d_plus)):
        assert x.allclose(-y)


def test_commutators_exact_two_below_cutoff():
    ops = mode_mix(SPACE, mixing_angle(1.0, 1.4))
    inner = SPACE.interior_indices(2)
    want = {"[c,c+]": 1.0, "[d,d+]": 1.0, "[c,d+]": 0.0, "[d,c+]": 0.0}
    for key, comm in ops.commutators().items():
        np.testing.assert_allclose(comm.block(inner), want[key] * np.eye(len(inner)), atol=1e-12)


def test_undriven_number_form_matches_h1():
    form = diagonalize(SPACE, 1.0, 0.6, 0.0, "h1")
    lam = form.lam
    assert interior_max_deviation(lam * form.modes.number_difference(), build_h1(SPACE, 1.0, 0.0, 0.6), 1) <= 1e-12
