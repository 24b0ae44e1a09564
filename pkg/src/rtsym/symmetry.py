"""Parity, rotation and mode-exchange operators and antiunitary certification.

An antiunitary reflection here is ``U K`` where ``K`` conjugates entries in the
Fock basis (time reversal: the basis is real, so ``a``, ``a+`` and the number
operators are fixed by ``K`` and only ``i -> -i`` changes) and ``U`` is a
monomial unitary: ``U[i, perm[i]] = phases[i]``. Because ``U`` maps basis
states to basis states, certification on a truncated space is exact.
"""
from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np
from scipy.optimize import minimize_scalar

from . import kernels
from .fock import FockSpace, Operator, SpaceMismatchError

DEFAULT_TOL = 1e-10
ANGLE_GRID_STEP = math.pi / 360


def parity_op(space: FockSpace) -> Operator:
    return Operator(space, np.diag((-1.0) ** space.total_number))


def rotation_op(space: FockSpace, theta: float) -> Operator:
    return Operator(space, np.diag(np.exp(1j * theta * space.total_number)))


def exchange_permutation(space: FockSpace) -> np.ndarray:
    """Index map of ``|n_a, n_b> -> |n_b, n_a>`` (an involution)."""
    if space.num_modes != 2:
        raise ValueError(f"mode exchange needs exactly two modes, got {space.num_modes}")
    occ = space.occupations
    return (occ[:, 1] * (space.cutoff + 1) + occ[:, 0]).astype(np.int64)


def exchange_op(space: FockSpace) -> Operator:
    perm = exchange_permutation(space)
    m = np.zeros((space.dim, space.dim))
    m[perm, np.arange(space.dim)] = 1.0
    return Operator(space, m)


@dataclass(frozen=True, eq=False)
class AntiunitarySpec:
    """Monomial unitary ``U`` (``U[i, perm[i]] = phases[i]``), optionally followed by conjugation.

    Acting on an operator gives ``U conj(H) U^-1``; on a state, ``U conj(v)``.
    """

    space: FockSpace
    perm: np.ndarray
    phases: np.ndarray
    conjugates: bool = True
    label: str = "custom"
    theta: float | None = None

    def __post_init__(self):
        perm = np.ascontiguousarray(self.perm, dtype=np.int64)
        phases = np.ascontiguousarray(self.phases, dtype=np.complex128)
        n = self.space.dim
        if perm.shape != (n,) or phases.shape != (n,):
            raise ValueError("perm and phases must both have length dim")
        if not np.array_equal(np.sort(perm), np.arange(n)):
            raise ValueError("perm is not a permutation of the basis")
        if np.max(np.abs(np.abs(phases) - 1.0)) > 1e-12:
            raise ValueError("phases must have unit modulus")
        perm.setflags(write=False)
        phases.setflags(write=False)
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "phases", phases)

    @classmethod
    def from_unitary(cls, unitary: Operator, conjugates: bool = True, label: str = "custom"):
        """Factor a monomial unitary matrix into permutation and phases."""
        m = unitary.matrix
        nz = np.abs(m) > 1e-12
        if not np.all(nz.sum(axis=1) == 1):
            raise ValueError("unitary is not a phase times a basis permutation")
        perm = np.argmax(nz, axis=1)
        phases = m[np.arange(m.shape[0]), perm]
        return cls(unitary.space, perm, phases, conjugates, label)

    @property
    def unitary(self) -> Operator:
        m = np.zeros((self.space.dim, self.space.dim), dtype=np.complex128)
        m[np.arange(self.space.dim), self.perm] = self.phases
        return Operator(self.space, m)

    def apply_vector(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.complex128)
        x = np.conj(v) if self.conjugates else v
        return self.phases * x[self.perm]

    def record(self, residual: float, verdict: bool) -> dict:
        return {
            "symmetry": self.label,
            "theta": self.theta,
            "residual": float(residual),
            "verdict": bool(verdict),
        }


def pt_spec(space: FockSpace) -> AntiunitarySpec:
    """Modified parity-time reflection ``P_S P T``."""
    perm = exchange_permutation(space)
    phases = (-1.0) ** space.total_number[perm]
    return AntiunitarySpec(space, perm, phases, True, "PT", math.pi)


def rt_spec(space: FockSpace, theta: float) -> AntiunitarySpec:
    """Modified rotation-time reflection ``P_S R(theta) T``."""
    perm = exchange_permutation(space)
    phases = np.exp(1j * theta * space.total_number[perm])
    return AntiunitarySpec(space, perm, phases, True, "RT", float(theta))


def antiunitary_transform(spec: AntiunitarySpec, h: Operator) -> Operator:
    if spec.space != h.space:
        raise SpaceMismatchError(f"{spec.space} vs {h.space}")
    return Operator(
        h.space, kernels.reflection_transform(h.matrix, spec.perm, spec.phases, spec.conjugates)
    )


@dataclass(frozen=True)
class Certificate:
    symmetric: bool
    residual: float
    spec: AntiunitarySpec

    def __bool__(self):
        return self.symmetric

    def record(self) -> dict:
        return self.spec.record(self.residual, self.symmetric)


def is_symmetric(h: Operator, spec: AntiunitarySpec, tol: float = DEFAULT_TOL) -> Certificate:
    """Max-norm test of ``A H A^-1 == H``; the residual is always reported."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if spec.space != h.space:
        raise SpaceMismatchError(f"{spec.space} vs {h.space}")
    if h.space.dim == 0:
        return Certificate(True, 0.0, spec)
    r = float(kernels.reflection_residual(h.matrix, spec.perm, spec.phases, spec.conjugates))
    return Certificate(r <= tol, r, spec)


def _wrap_angle(theta: float) -> float:
    """Map to (-pi, pi]."""
    t = math.remainder(theta, 2 * math.pi)
    return math.pi if t <= -math.pi else t


def rt_residual(h: Operator, theta: float) -> float:
    perm = exchange_permutation(h.space)
    return float(
        kernels.rotation_residual_scan(
            h.matrix, perm, np.ascontiguousarray(h.space.total_number), np.array([float(theta)])
        )[0]
    )


def _polish_angle(m, perm, ntot, theta):
    """One phase-alignment step from ``theta``.

    At a symmetric angle every entry satisfies ``exp(i theta k) x = h`` with
    ``k`` the change in total number, so the leftover phase of each entry
    divided by ``k`` estimates the correction. Entries are weighted by
    ``|x| |k|``, which is how strongly they constrain the angle.
    """
    x = np.conj(m)[np.ix_(perm, perm)]
    k = (ntot[:, None] - ntot[None, :]).astype(np.float64)
    use = (k != 0) & (np.abs(x) > 0) & (np.abs(m) > 0)
    if not np.any(use):
        return theta
    xs, hs, ks = x[use], m[use], k[use]
    delta = np.angle(hs / (np.exp(1j * theta * ks) * xs)) / ks
    w = np.abs(xs) * np.abs(ks)
    return float(theta + np.sum(w * delta) / np.sum(w))


def find_rt_angle(h: Operator, tol: float = DEFAULT_TOL, max_candidates: int = 8) -> float | None:
    """Angle in (-pi, pi] at which ``h`` is rotation-time symmetric, or ``None``.

    Scans a grid of step pi/360, refines the deepest local minima of the
    residual and returns the symmetric angle of smallest magnitude.
    """
    perm = exchange_permutation(h.space)
    ntot = np.ascontiguousarray(h.space.total_number)
    n_grid = int(round(2 * math.pi / ANGLE_GRID_STEP))
    grid = -math.pi + ANGLE_GRID_STEP * np.arange(1, n_grid + 1)
    res = kernels.rotation_residual_scan(h.matrix, perm, ntot, grid)

    spread = float(np.max(res) - np.min(res))
    if spread <= tol:
        # residual independent of the angle
        return 0.0 if res[np.argmin(np.abs(grid))] <= tol else None

    left, right = np.roll(res, 1), np.roll(res, -1)
    minima = np.flatnonzero((res <= left) & (res <= right))
    minima = minima[np.argsort(res[minima], kind="stable")][:max_candidates]

    def f(t):
        return kernels.rotation_residual_scan(h.matrix, perm, ntot, np.array([t]))[0]

    found = []
    for m in minima:
        t0 = grid[m]
        opt = minimize_scalar(
            f,
            bounds=(t0 - ANGLE_GRID_STEP, t0 + ANGLE_GRID_STEP),
            method="bounded",
            options={"xatol": 1e-14, "maxiter": 500},
        )
        t1 = _polish_angle(h.matrix, perm, ntot, float(opt.x))
        cand = [(f(t1), t1), (float(opt.fun), float(opt.x)), (float(res[m]), float(t0))]
        r, t = min(cand)
        if r <= tol:
            found.append(_wrap_angle(t))
    if not found:
        return None
    return min(found, key=lambda t: (abs(t), -t))


@dataclass(frozen=True)
class StateSymmetry:
    """Outcome of testing whether a state is an eigenvector of an antiunitary reflection."""

    symmetric: bool
    chi: complex | None
    residual: float

    @property
    def broken(self) -> bool:
        return not self.symmetric


def classify_state_symmetry(
    state, spec: AntiunitarySpec, tol: float = DEFAULT_TOL
) -> StateSymmetry:
    v = np.asarray(state, dtype=np.complex128)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("zero vector has no symmetry class")
    v = v / norm
    w = spec.apply_vector(v)
    chi = complex(np.vdot(v, w))
    residual = float(np.linalg.norm(w - chi * v))
    if residual <= tol and abs(abs(chi) - 1.0) <= tol:
        return StateSymmetry(True, chi, residual)
    return StateSymmetry(False, None, residual)
