"""Closed-form diagonalisation of the driven gain/loss pair via bosonic algebra.

The quadratic part is diagonalised by a complex (non-unitary) rotation of the
mode pair, ``[c, d] = R [a, b]`` and ``[c+, d+] = R [a+, b+]`` with
``R = [[cos, sin], [-sin, cos]]`` of a complex half-angle. ``c+`` is not the
Hermitian adjoint of ``c`` but the pair still obeys canonical commutation
relations. The drive is then absorbed by shifting each eigenmode by a
multiple of the identity, which leaves

    H = lam (c_eps+ c_eps - d_eps+ d_eps) + lam0 I.

This module is deliberately written without calling into
:mod:`rtsym.spectral` so the two can cross-check each other.
"""
from __future__ import annotations

from dataclasses import dataclass
import cmath

import numpy as np

from .fock import FockSpace, Operator, annihilation_op, creation_op, identity_op


class SingularMixingError(ArithmeticError):
    """The mode rotation degenerates at the exceptional point (lam = 0)."""


@dataclass(frozen=True)
class MixingAngle:
    cos_half: complex
    sin_half: complex
    lam: complex
    g: float
    kappa: float


def mixing_angle(g: float, kappa: float) -> MixingAngle:
    lam = cmath.sqrt(complex(g * g - kappa * kappa, 0.0))
    if lam == 0:
        raise SingularMixingError(f"kappa = g = {g}: mixing angle undefined")
    s = cmath.sqrt((lam + 1j * kappa) / (2 * lam))
    c = cmath.sqrt((lam - 1j * kappa) / (2 * lam))
    # principal roots fix cos and sin only up to sign; keep 2 sin cos lam = g
    if abs(2 * s * c * lam - g) > abs(2 * s * c * lam + g):
        c = -c
    return MixingAngle(c, s, lam, g, kappa)


@dataclass(frozen=True)
class EigenmodeOps:
    c: Operator
    c_plus: Operator
    d: Operator
    d_plus: Operator

    def commutators(self) -> dict:
        return {
            "[c,c+]": self.c.commutator(self.c_plus),
            "[d,d+]": self.d.commutator(self.d_plus),
            "[c,d+]": self.c.commutator(self.d_plus),
            "[d,c+]": self.d.commutator(self.c_plus),
        }

    def number_difference(self) -> Operator:
        return self.c_plus @ self.c - self.d_plus @ self.d


def mode_mix(space: FockSpace, angle: MixingAngle) -> EigenmodeOps:
    a, b = annihilation_op(space, 0), annihilation_op(space, 1)
    ad, bd = creation_op(space, 0), creation_op(space, 1)
    co, si = angle.cos_half, angle.sin_half
    return EigenmodeOps(
        c=co * a + si * b,
        c_plus=co * ad + si * bd,
        d=-si * a + co * b,
        d_plus=-si * ad + co * bd,
    )


@dataclass(frozen=True)
class DriveCoefficients:
    eps_c: complex
    eps_d: complex


def drive_coefficients(eps: float, angle: MixingAngle) -> DriveCoefficients:
    return DriveCoefficients(
        eps * (angle.cos_half + angle.sin_half),
        eps * (angle.cos_half - angle.sin_half),
    )


def displace(ops: EigenmodeOps, coeffs: DriveCoefficients, lam: complex) -> EigenmodeOps:
    """Shift ``c -> c + eps_c/lam``, ``d -> d - eps_d/lam`` (same for the plus operators)."""
    if lam == 0:
        raise SingularMixingError("displacement undefined at lam = 0")
    one = identity_op(ops.c.space)
    sc, sd = coeffs.eps_c / lam, coeffs.eps_d / lam
    return EigenmodeOps(
        c=ops.c + sc * one,
        c_plus=ops.c_plus + sc * one,
        d=ops.d - sd * one,
        d_plus=ops.d_plus - sd * one,
    )


def h1_phase_substitution(ops: EigenmodeOps) -> EigenmodeOps:
    """``i c -> c``, ``-i c+ -> c+`` and the same for ``d``."""
    return EigenmodeOps(1j * ops.c, -1j * ops.c_plus, 1j * ops.d, -1j * ops.d_plus)


@dataclass(frozen=True)
class DiagonalForm:
    lam: complex
    lam0: complex
    angle: MixingAngle
    coeffs: DriveCoefficients
    modes: EigenmodeOps
    displaced: EigenmodeOps

    def operator(self) -> Operator:
        one = identity_op(self.modes.c.space)
        return self.lam * self.displaced.number_difference() + self.lam0 * one

    def level(self, n: int) -> complex:
        return n * self.lam + self.lam0

    @property
    def e0(self) -> complex:
        return self.level(0)

    @property
    def e_plus(self) -> complex:
        return self.level(1)

    @property
    def e_minus(self) -> complex:
        return self.level(-1)


def diagonalize(space: FockSpace, g: float, kappa: float, eps: float, model: str = "h2") -> DiagonalForm:
    """Run the full pipeline for ``model`` in ``{"h1", "h2"}``.

    ``lam0`` comes from completing the square, ``-(eps_c^2 - eps_d^2) / lam``.
    """
    if model not in ("h1", "h2"):
        raise ValueError(f"model must be 'h1' or 'h2', got {model!r}")
    angle = mixing_angle(g, kappa)
    modes = mode_mix(space, angle)
    if model == "h1":
        modes = h1_phase_substitution(modes)
    coeffs = drive_coefficients(eps, angle)
    shifted = displace(modes, coeffs, angle.lam)
    lam0 = -(coeffs.eps_c**2 - coeffs.eps_d**2) / angle.lam
    return DiagonalForm(angle.lam, lam0, angle, coeffs, modes, shifted)


def interior_max_deviation(x: Operator, y: Operator, buffer: int) -> float:
    idx = x.space.interior_indices(buffer)
    d = x.block(idx) - y.block(idx)
    return float(np.max(np.abs(d), initial=0.0))
