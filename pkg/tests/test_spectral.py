import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rtsym.fock import FockSpace
from rtsym.hamiltonians import build_h1, build_h2
from rtsym.spectral import (
    EigensolverError,
    SpectrumClass,
    analytic_spectrum,
    branch_lambda,
    characteristic_polynomial,
    classify_spectrum,
    coalescence_measure,
    conserves_total_number,
    eigenspectrum,
    locate_ep,
    match_levels,
    single_excitation_block,
    splitting_law,
    track_branches,
)


def test_classify_real_and_paired():
    assert classify_spectrum([1.0, -2.0, 0.5]).kind == SpectrumClass.ALL_REAL
    c = classify_spectrum([1 + 1j, 1 - 1j, 3.0])
    assert c.kind == SpectrumClass.CONJUGATE_PAIRED and len(c.pairs) == 1
    m = classify_spectrum([1 + 1j, 2 - 1j])
    assert m.kind == SpectrumClass.MIXED and len(m.unpaired) == 2


def test_classify_threshold_is_relative():
    big = 1e6
    assert classify_spectrum([big, 1 + 1e-4j], 1e-8).kind == SpectrumClass.ALL_REAL
    assert classify_spectrum([1.0, 1 + 1e-4j], 1e-8).kind == SpectrumClass.MIXED
    with pytest.raises(ValueError):
        classify_spectrum([1.0], 0.0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(0.01, 5)), min_size=1, max_size=6),
       st.lists(st.floats(-5, 5), max_size=4))
def test_conjugate_closed_sets_never_mixed(pairs, reals):
    eigs = [complex(x, y) for x, y in pairs] + [complex(x, -y) for x, y in pairs] + reals
    np.random.default_rng(len(eigs)).shuffle(eigs)
    assert classify_spectrum(eigs).kind == SpectrumClass.CONJUGATE_PAIRED


def test_eigenspectrum_sorted_and_normalised():
    h = build_h2(FockSpace(2, 4), 1.0, 0.1, 0.3)
    rep = eigenspectrum(h)
    keys = list(zip(rep.eigenvalues.real, rep.eigenvalues.imag))
    assert keys == sorted(keys)
    np.testing.assert_allclose(np.linalg.norm(rep.eigenvectors, axis=0), 1.0)
    np.testing.assert_allclose(h.matrix @ rep.eigenvectors, rep.eigenvectors * rep.eigenvalues, atol=1e-10)


def test_eigenspectrum_rejects_nonfinite():
    with pytest.raises(EigensolverError):
        eigenspectrum(np.array([[np.inf, 0], [0, 1]]))


def test_characteristic_polynomial_matches_eigenvalues():
    block = single_excitation_block(build_h1(FockSpace(2, 2), 1.0, 0.0, 0.6))
    coeffs = characteristic_polynomial(block)
    np.testing.assert_allclose(coeffs, [1.0, 0.0, -(1.0 - 0.36)], atol=1e-14)


def test_coalescence_flags_ep():
    space = FockSpace(2, 1)
    far = coalescence_measure(eigenspectrum(single_excitation_block(build_h1(space, 1.0, 0.0, 0.2))))
    near = coalescence_measure(eigenspectrum(single_excitation_block(build_h1(space, 1.0, 0.0, 1 - 1e-8))))
    assert far.min_angle > 1.0 and near.min_angle < 1e-3
    assert near.condition > 1e3 * far.condition


def test_analytic_branches():
    assert branch_lambda(1.0, 0.6) == pytest.approx(0.8)
    assert branch_lambda(1.0, 1.25) == pytest.approx(0.75j)
    an = analytic_spectrum(1.0, 0.6, 0.1)
    assert an.lam0 == pytest.approx(-0.03125)
    assert (an.e_minus, an.e0, an.e_plus) == pytest.approx((-0.83125, -0.03125, 0.76875))
    above = analytic_spectrum(1.0, 1.25, 0.1)
    assert above.lam0.imag == 0 and above.lam0.real > 0


def test_analytic_singular_point():
    at = analytic_spectrum(1.0, 1.0, 0.1)
    assert at.singular and at.e0 is None
    free = analytic_spectrum(1.0, 1.0, 0.0)
    assert free.singular and free.e0 == 0
    with pytest.raises(ValueError):
        analytic_spectrum(1.0, math.inf, 0.0)


def test_conservation_detection():
    space = FockSpace(2, 3)
    assert conserves_total_number(build_h1(space, 1.0, 0.0, 0.5))
    assert not conserves_total_number(build_h1(space, 1.0, 0.1, 0.5))


@pytest.mark.parametrize("g", [0.3, 1.0, 3.0])
def test_locate_ep(g):
    loc = locate_ep(g, 0.0, 0.0, 2 * g, 1e-8)
    assert abs(loc.kappa - g) <= 1e-8
    assert loc.caveat is None
    driven = locate_ep(g, 0.1, 0.0, 2 * g)
    assert driven.caveat is not None


def test_locate_ep_needs_bracket():
    with pytest.raises(ValueError):
        locate_ep(1.0, 0.0, 0.0, 0.5)
    with pytest.raises(ValueError):
        locate_ep(1.0, 0.0, 1.0, 0.5)


def test_splitting_law():
    s = splitting_law(1.0, 1.0 - 1e-4)
    assert s.relative_gap < 1e-4
    with pytest.raises(ValueError):
        splitting_law(1.0, 1.1)


def test_match_and_track():
    assert list(match_levels([3.0, 1.0, 2.0], [1.1, 2.9])) == [1.0, 3.0]
    spectra = [np.array([-x, x, 5.0]) for x in np.linspace(1.0, 0.1, 10)]
    out = track_branches(spectra, [-1.0, 1.0])
    np.testing.assert_allclose(out[:, 1], np.linspace(1.0, 0.1, 10))
