import cmath
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rtsym.fock import FockSpace, annihilation_op, creation_op
from rtsym.hamiltonians import (
    Detuning,
    DriveH1,
    DrivePhased,
    GainLoss,
    HamiltonianSpec,
    LinearCoupling,
    TableTerm,
    assemble,
    build_h1,
    build_h2,
    build_h3,
    h1_spec,
    h2_spec,
    h3_spec,
    quadratic_parameters,
)

SPACE = FockSpace(2, 5)
_real = st.floats(0.0, 2.0, allow_nan=False)


@settings(max_examples=25, deadline=None)
@given(_real, _real, _real)
def test_spec_assembly_matches_operator_algebra(g, eps, kappa):
    assert assemble(SPACE, h1_spec(g, eps, kappa)).allclose(build_h1(SPACE, g, eps, kappa), atol=1e-12)
    assert assemble(SPACE, h2_spec(g, eps, kappa)).allclose(build_h2(SPACE, g, eps, kappa), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(-1, 1), st.complex_numbers(max_magnitude=2), _real, st.floats(-3.2, 3.2), _real)
def test_h3_spec_matches(delta, g, eps, phi, kappa):
    h = assemble(SPACE, h3_spec(delta, g, eps, phi, kappa))
    assert h.allclose(build_h3(SPACE, delta, g, eps, phi, kappa), atol=1e-12)


def test_hermitian_without_gain_loss():
    assert build_h2(SPACE, 1.0, 0.3, 0.0).is_hermitian()
    assert not build_h2(SPACE, 1.0, 0.3, 0.2).is_hermitian()


def test_gain_loss_signs():
    h = GainLoss(0.5).operator(SPACE)
    assert h.matrix[SPACE.index((1, 0)), SPACE.index((1, 0))] == pytest.approx(-0.5j)
    assert h.matrix[SPACE.index((0, 1)), SPACE.index((0, 1))] == pytest.approx(0.5j)


@pytest.mark.parametrize("kind", "ABCD")
@pytest.mark.parametrize("order", [1, 2, 3])
def test_table_terms_finite_and_cd_hermitian(kind, order):
    t = TableTerm(kind, order, 0.7 + 0.2j, 0.4)
    m = t.matrix(FockSpace(2, 6))
    if kind in "CD":
        np.testing.assert_allclose(m, m.conj().T, atol=1e-12)
    assert np.isfinite(m).all()


def test_table_term_c_explicit():
    space = FockSpace(2, 4)
    a, b = annihilation_op(space, 0), annihilation_op(space, 1)
    ad, bd = creation_op(space, 0), creation_op(space, 1)
    phi = 0.3
    x = cmath.exp(1j * phi) * (a @ a @ bd + b @ b @ ad)
    want = 2.0 * (x + x.adjoint())
    assert TableTerm("C", 1, -2.0, phi).operator(space).allclose(want, atol=1e-12)


@pytest.mark.parametrize("bad", [
    lambda: TableTerm("E", 1),
    lambda: TableTerm("C", 0),
    lambda: GainLoss(-1.0),
    lambda: DriveH1(float("nan")),
    lambda: Detuning(1j),
    lambda: HamiltonianSpec(()),
])
def test_invalid_terms(bad):
    with pytest.raises((ValueError, TypeError)):
        bad()


def test_two_mode_only():
    with pytest.raises(ValueError):
        LinearCoupling(1.0).matrix(FockSpace(3, 2))


def test_json_roundtrip():
    spec = HamiltonianSpec((LinearCoupling(1 + 0.5j), DrivePhased(0.1, 0.2), GainLoss(0.3),
                            TableTerm("D", 2, 0.5j, 0.7)))
    back = HamiltonianSpec.from_dict(json.loads(json.dumps(spec.to_dict())))
    assert back == spec


def test_with_parameter_paths():
    spec = h2_spec(1.0, 0.1, 0.0)
    assert spec.with_parameter("kappa", 0.4).get_parameter("kappa") == 0.4
    assert spec.with_parameter("terms.1.eps", 0.3).terms[1].eps == 0.3
    with pytest.raises(KeyError):
        spec.with_parameter("nope", 1.0)
    with pytest.raises(KeyError):
        spec.with_parameter("terms.0.eps", 1.0)


def test_quadratic_parameters():
    assert quadratic_parameters(h1_spec(1.0, 0.2, 0.3)) == (1.0, 0.2, 0.3)
    assert quadratic_parameters(h3_spec(0.0, 1.0, 0.2, 0.5, 0.3)) == (1.0, 0.2, 0.3)
    assert quadratic_parameters(h3_spec(0.1, 1.0, 0.2, 0.5, 0.3)) is None
    assert quadratic_parameters(h3_spec(0.0, 1j, 0.2, 0.5, 0.3)) is None


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 2.0), _real, _real)
def test_h3_reduces_to_h1_and_h2(g, eps, kappa):
    assert build_h3(SPACE, 0.0, g, eps, np.pi / 2, kappa).allclose(build_h1(SPACE, g, eps, kappa), atol=1e-12)
    assert build_h3(SPACE, 0.0, g, eps, 0.0, kappa).allclose(build_h2(SPACE, g, eps, kappa), atol=1e-12)


def test_term_order_does_not_change_matrix():
    spec = h2_spec(1.0, 0.1, 0.6)
    flipped = HamiltonianSpec(tuple(reversed(spec.terms)))
    assert assemble(SPACE, spec).allclose(assemble(SPACE, flipped))
    assert flipped.to_dict()["terms"][0]["type"] == "GainLoss"
