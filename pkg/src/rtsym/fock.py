"""Truncated multimode Fock space and dense bosonic operators.

Basis ordering is row-major over occupation tuples with mode 0 outermost, so
for two modes with cutoff N the state ``|n_a, n_b>`` sits at index
``n_a * (N + 1) + n_b``. Every mode keeps occupations ``0..cutoff``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
import itertools

import numpy as np

MAX_DIM = np.iinfo(np.int64).max


class SpaceMismatchError(ValueError):
    """Raised when operators from different Fock spaces are combined."""


@dataclass(frozen=True)
class FockSpace:
    num_modes: int
    cutoff: int

    def __post_init__(self):
        for name in ("num_modes", "cutoff"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
                raise TypeError(f"{name} must be an integer, got {value!r}")
            if value < 1:
                raise ValueError(f"{name} must be >= 1, got {value}")
        if (self.cutoff + 1) ** self.num_modes > MAX_DIM:
            raise OverflowError(
                f"dimension ({self.cutoff + 1})**{self.num_modes} overflows the index type"
            )

    @property
    def dim(self) -> int:
        return (self.cutoff + 1) ** self.num_modes

    @cached_property
    def occupations(self) -> np.ndarray:
        """``(dim, num_modes)`` array; row ``i`` is the occupation tuple of state ``i``."""
        occ = np.array(
            list(itertools.product(range(self.cutoff + 1), repeat=self.num_modes)),
            dtype=np.int64,
        )
        occ.setflags(write=False)
        return occ

    @cached_property
    def total_number(self) -> np.ndarray:
        tot = self.occupations.sum(axis=1)
        tot.setflags(write=False)
        return tot

    def index(self, occupation) -> int:
        occupation = tuple(int(n) for n in occupation)
        if len(occupation) != self.num_modes:
            raise ValueError(f"expected {self.num_modes} occupations, got {len(occupation)}")
        idx = 0
        for n in occupation:
            if not 0 <= n <= self.cutoff:
                raise ValueError(f"occupation {n} outside 0..{self.cutoff}")
            idx = idx * (self.cutoff + 1) + n
        return idx

    def occupation(self, index: int) -> tuple[int, ...]:
        if not 0 <= index < self.dim:
            raise IndexError(f"basis index {index} outside 0..{self.dim - 1}")
        return tuple(int(n) for n in self.occupations[index])

    def basis_state(self, occupation) -> np.ndarray:
        v = np.zeros(self.dim, dtype=np.complex128)
        v[self.index(occupation)] = 1.0
        return v

    def interior_indices(self, buffer: int) -> np.ndarray:
        """Indices of states whose every occupation is ``<= cutoff - buffer``.

        Operator products of total order ``k`` are exact away from the
        truncation edge once ``buffer >= k``.
        """
        if buffer < 0:
            raise ValueError("buffer must be non-negative")
        keep = np.all(self.occupations <= self.cutoff - buffer, axis=1)
        return np.flatnonzero(keep)

    def _check_mode(self, mode: int):
        if not 0 <= mode < self.num_modes:
            raise IndexError(f"mode {mode} out of range for {self.num_modes} modes")


def make_space(num_modes: int, cutoff: int) -> FockSpace:
    return FockSpace(num_modes, cutoff)


@dataclass(frozen=True, eq=False)
class Operator:
    """Dense complex matrix acting on a :class:`FockSpace`.

    Instances are immutable; the underlying array is marked read-only.
    """

    space: FockSpace
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128, copy=True)
        if m.shape != (self.space.dim, self.space.dim):
            raise ValueError(f"matrix shape {m.shape} does not match dim {self.space.dim}")
        if not np.all(np.isfinite(m)):
            raise FloatingPointError("operator matrix has non-finite entries")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def _same_space(self, other: Operator):
        if not isinstance(other, Operator):
            return NotImplemented
        if other.space != self.space:
            raise SpaceMismatchError(f"{self.space} vs {other.space}")
        return None

    def __add__(self, other):
        if self._same_space(other) is NotImplemented:
            return NotImplemented
        return Operator(self.space, self.matrix + other.matrix)

    def __sub__(self, other):
        if self._same_space(other) is NotImplemented:
            return NotImplemented
        return Operator(self.space, self.matrix - other.matrix)

    def __neg__(self):
        return Operator(self.space, -self.matrix)

    def __matmul__(self, other):
        if self._same_space(other) is NotImplemented:
            return NotImplemented
        return Operator(self.space, self.matrix @ other.matrix)

    def __mul__(self, scalar):
        if isinstance(scalar, Operator) or np.ndim(scalar) != 0:
            return NotImplemented
        return Operator(self.space, complex(scalar) * self.matrix)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative operator powers are not supported")
        return Operator(self.space, np.linalg.matrix_power(self.matrix, k))

    def adjoint(self) -> Operator:
        return Operator(self.space, self.matrix.conj().T)

    def basis_conjugate(self) -> Operator:
        """Entrywise complex conjugate in the Fock basis (action of time reversal)."""
        return Operator(self.space, self.matrix.conj())

    def commutator(self, other: Operator) -> Operator:
        return self @ other - other @ self

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T), initial=0.0) <= tol)

    def block(self, indices) -> np.ndarray:
        idx = np.asarray(indices)
        return self.matrix[np.ix_(idx, idx)]

    def allclose(self, other: Operator, atol: float = 1e-12) -> bool:
        self._same_space(other)
        return bool(np.max(np.abs(self.matrix - other.matrix), initial=0.0) <= atol)


def _ladder(space: FockSpace, mode: int) -> np.ndarray:
    space._check_mode(mode)
    single = np.diag(np.sqrt(np.arange(1, space.cutoff + 1, dtype=np.float64)), 1)
    eye = np.eye(space.cutoff + 1)
    out = np.ones((1, 1))
    for m in range(space.num_modes):
        out = np.kron(out, single if m == mode else eye)
    return out


@lru_cache(maxsize=64)
def _single_mode_word(cutoff: int, n_create: int, n_annihilate: int) -> np.ndarray:
    a = np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=np.float64)), 1)
    w = np.linalg.matrix_power(a.T, n_create) @ np.linalg.matrix_power(a, n_annihilate)
    w.setflags(write=False)
    return w


@lru_cache(maxsize=256)
def _monomial_matrix(space: FockSpace, word: tuple) -> np.ndarray:
    out = np.ones((1, 1))
    for c, n in word:
        if c < 0 or n < 0:
            raise ValueError("powers must be non-negative")
        factor = np.eye(space.cutoff + 1) if c == n == 0 else _single_mode_word(space.cutoff, c, n)
        out = np.kron(out, factor)
    out.setflags(write=False)
    return out


def monomial_matrix(space: FockSpace, word: dict) -> np.ndarray:
    """Read-only matrix of the normal-ordered product ``prod_m (a_m+)^c_m (a_m)^n_m``.

    ``word`` maps mode ``m`` to ``(c_m, n_m)``. The Kronecker product of
    single-mode factors equals the product of the truncated multimode ladder
    matrices, so no truncation error beyond the cutoff itself enters.
    """
    for m in word:
        space._check_mode(m)
    key = tuple(tuple(word.get(m, (0, 0))) for m in range(space.num_modes))
    return _monomial_matrix(space, key)


def monomial(space: FockSpace, word: dict) -> Operator:
    return Operator(space, monomial_matrix(space, word))


def annihilation_op(space: FockSpace, mode: int) -> Operator:
    return Operator(space, _ladder(space, mode))


def creation_op(space: FockSpace, mode: int) -> Operator:
    return Operator(space, _ladder(space, mode).T)


def number_op(space: FockSpace, mode: int) -> Operator:
    space._check_mode(mode)
    return Operator(space, np.diag(space.occupations[:, mode].astype(np.float64)))


def identity_op(space: FockSpace) -> Operator:
    return Operator(space, np.eye(space.dim))


def zero_op(space: FockSpace) -> Operator:
    return Operator(space, np.zeros((space.dim, space.dim)))


def op_add(x: Operator, y: Operator) -> Operator:
    return x + y


def op_mul(x: Operator, y: Operator) -> Operator:
    return x @ y


def op_scale(c: complex, x: Operator) -> Operator:
    return c * x


def op_adjoint(x: Operator) -> Operator:
    return x.adjoint()


def op_basis_conjugate(x: Operator) -> Operator:
    return x.basis_conjugate()
