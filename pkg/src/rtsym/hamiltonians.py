"""Driven gain/loss two-mode Hamiltonians and rotation-time invariant terms.

Energies are in units of the intermode coupling ``g`` unless a spec says
otherwise. Mode 0 is ``a`` (the lossy cavity) and mode 1 is ``b`` (the
amplifying one).
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
import cmath
from functools import lru_cache
from typing import ClassVar, Union

import numpy as np

from .fock import FockSpace, Operator, annihilation_op, creation_op, monomial_matrix

TABLE_KINDS = ("A", "B", "C", "D")


def _finite(name, value):
    if not cmath.isfinite(complex(value)):
        raise ValueError(f"{name} must be finite, got {value!r}")


def _nonneg(name, value):
    _finite(name, value)
    if isinstance(value, complex) or value < 0:
        raise ValueError(f"{name} must be a real number >= 0, got {value!r}")


def _word(space: FockSpace, a=(0, 0), b=(0, 0)) -> np.ndarray:
    """Matrix of ``a+^a[0] a^a[1] b+^b[0] b^b[1]``."""
    return monomial_matrix(space, {0: a, 1: b})


def _check_two_mode(space: FockSpace):
    if space.num_modes != 2:
        raise ValueError(f"two-mode Hamiltonian needs num_modes=2, got {space.num_modes}")


def _two_mode(space: FockSpace):
    if space.num_modes != 2:
        raise ValueError(f"two-mode Hamiltonian needs num_modes=2, got {space.num_modes}")
    a, b = annihilation_op(space, 0), annihilation_op(space, 1)
    return a, b, creation_op(space, 0), creation_op(space, 1)


class _TermBase:
    def operator(self, space: FockSpace) -> Operator:
        return Operator(space, self.matrix(space))


@dataclass(frozen=True)
class LinearCoupling(_TermBase):
    """``g a+ b + g* b+ a``."""

    g: complex
    tag: ClassVar[str] = "LinearCoupling"

    def __post_init__(self):
        _finite("g", self.g)

    def matrix(self, space) -> np.ndarray:
        _check_two_mode(space)
        g = complex(self.g)
        return g * _word(space, a=(1, 0), b=(0, 1)) + g.conjugate() * _word(space, a=(0, 1), b=(1, 0))


@dataclass(frozen=True)
class DriveH1(_TermBase):
    """Quadrature drive ``eps (i a - i a+) + eps (i b - i b+)``."""

    eps: float
    tag: ClassVar[str] = "DriveH1"

    def __post_init__(self):
        _nonneg("eps", self.eps)

    def matrix(self, space) -> np.ndarray:
        _check_two_mode(space)
        xa = _word(space, a=(0, 1)) - _word(space, a=(1, 0))
        xb = _word(space, b=(0, 1)) - _word(space, b=(1, 0))
        return (1j * self.eps) * (xa + xb)


@dataclass(frozen=True)
class DrivePhased(_TermBase):
    """``eps (e^{i phi} a + e^{-i phi} a+)`` plus the same for ``b``."""

    eps: float
    phi: float = 0.0
    tag: ClassVar[str] = "DrivePhased"

    def __post_init__(self):
        _nonneg("eps", self.eps)
        _finite("phi", self.phi)

    def matrix(self, space) -> np.ndarray:
        _check_two_mode(space)
        z = self.eps * cmath.exp(1j * self.phi)
        lower = _word(space, a=(0, 1)) + _word(space, b=(0, 1))
        return z * lower + z.conjugate() * lower.T


@dataclass(frozen=True)
class GainLoss(_TermBase):
    """Loss ``-i kappa a+ a`` on mode a, gain ``+i kappa b+ b`` on mode b."""

    kappa: float
    tag: ClassVar[str] = "GainLoss"

    def __post_init__(self):
        _nonneg("kappa", self.kappa)

    def matrix(self, space) -> np.ndarray:
        _check_two_mode(space)
        na, nb = _word(space, a=(1, 1)), _word(space, b=(1, 1))
        return (-1j * self.kappa) * na + (1j * self.kappa) * nb


@dataclass(frozen=True)
class Detuning(_TermBase):
    delta: float
    tag: ClassVar[str] = "Detuning"

    def __post_init__(self):
        _finite("delta", self.delta)
        if isinstance(self.delta, complex):
            raise ValueError("delta must be real")

    def matrix(self, space) -> np.ndarray:
        _check_two_mode(space)
        return self.delta * (_word(space, a=(1, 1)) + _word(space, b=(1, 1)))


@dataclass(frozen=True)
class TableTerm(_TermBase):
    """One of the four rotation-time invariant families, symmetric at ``theta = -2 phi``.

    ``A``: ``c a+^n a^n + c* b+^n b^n``
    ``B``: ``c a+^m b^m + c* b+^m a^m``
    ``C``: ``|c| (e^{i phi} a^{j+1} b+^j + e^{i phi} b^{j+1} a+^j + h.c.)``
    ``D``: ``|c| (e^{2i phi} a^{l+2} b+^l + e^{2i phi} b^{l+2} a+^l + h.c.)``
    """

    kind: str
    order: int
    coefficient: complex = 1.0
    phi: float = 0.0
    tag: ClassVar[str] = "TableTerm"

    def __post_init__(self):
        if self.kind not in TABLE_KINDS:
            raise ValueError(f"kind must be one of {TABLE_KINDS}, got {self.kind!r}")
        if isinstance(self.order, bool) or not isinstance(self.order, (int, np.integer)):
            raise TypeError(f"order must be an integer, got {self.order!r}")
        if self.order < 1:
            hint = " (use DrivePhased for the linear drive)" if self.kind in "CD" else ""
            raise ValueError(f"kind {self.kind} needs order >= 1, got {self.order}{hint}")
        _finite("coefficient", self.coefficient)
        _finite("phi", self.phi)

    def matrix(self, space) -> np.ndarray:
        _check_two_mode(space)
        k = int(self.order)
        c = complex(self.coefficient)
        if self.kind == "A":
            m = c * _word(space, a=(k, k)) + c.conjugate() * _word(space, b=(k, k))
            return m
        if self.kind == "B":
            m = c * _word(space, a=(k, 0), b=(0, k)) + c.conjugate() * _word(space, a=(0, k), b=(k, 0))
            return m
        # C: a^{k+1} b+^k, D: a^{k+2} b+^k, each with its mode-swapped partner
        lift, phase = (1, cmath.exp(1j * self.phi)) if self.kind == "C" else (2, cmath.exp(2j * self.phi))
        x = phase * (_word(space, a=(0, k + lift), b=(k, 0)) + _word(space, a=(k, 0), b=(0, k + lift)))
        return abs(c) * (x + x.conj().T)


Term = Union[LinearCoupling, DriveH1, DrivePhased, GainLoss, Detuning, TableTerm]
TERM_TYPES = {cls.tag: cls for cls in (LinearCoupling, DriveH1, DrivePhased, GainLoss, Detuning, TableTerm)}
COMPLEX_FIELDS = {"g", "coefficient"}


@dataclass(frozen=True)
class HamiltonianSpec:
    terms: tuple
    units: str = "g"

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))
        if not self.terms:
            raise ValueError("a Hamiltonian spec needs at least one term")
        for t in self.terms:
            if type(t).__name__ not in TERM_TYPES:
                raise TypeError(f"unknown term {t!r}")

    def parameter_names(self) -> set[str]:
        return {f.name for t in self.terms for f in fields(t)}

    def with_parameter(self, name: str, value) -> HamiltonianSpec:
        """Set ``name`` on every term carrying it, or on one term via ``terms.<i>.<name>``."""
        parts = name.split(".")
        if len(parts) == 3 and parts[0] == "terms":
            i, key = int(parts[1]), parts[2]
            if not 0 <= i < len(self.terms):
                raise KeyError(f"no term at index {i}")
            if key not in {f.name for f in fields(self.terms[i])}:
                raise KeyError(f"term {i} ({self.terms[i].tag}) has no parameter {key!r}")
            terms = list(self.terms)
            terms[i] = replace(terms[i], **{key: value})
            return replace(self, terms=tuple(terms))
        if len(parts) != 1:
            raise KeyError(f"bad parameter path {name!r}")
        if name not in self.parameter_names():
            raise KeyError(f"no term has parameter {name!r}")
        terms = tuple(
            replace(t, **{name: value}) if name in {f.name for f in fields(t)} else t
            for t in self.terms
        )
        return replace(self, terms=terms)

    def get_parameter(self, name: str):
        for t in self.terms:
            if name in {f.name for f in fields(t)}:
                return getattr(t, name)
        raise KeyError(name)

    def to_dict(self) -> dict:
        out = []
        for t in self.terms:
            d = {"type": t.tag}
            for k, v in asdict(t).items():
                d[k] = _encode_number(v) if k in COMPLEX_FIELDS else v
            out.append(d)
        return {"units": self.units, "terms": out}

    @classmethod
    def from_dict(cls, data: dict) -> HamiltonianSpec:
        try:
            raw_terms = data["terms"]
        except (KeyError, TypeError):
            raise ValueError("hamiltonian spec needs a 'terms' list") from None
        terms = []
        for i, raw in enumerate(raw_terms):
            raw = dict(raw)
            tag = raw.pop("type", None)
            if tag not in TERM_TYPES:
                raise ValueError(f"terms[{i}].type: unknown term type {tag!r}")
            kw = {k: (_decode_number(v) if k in COMPLEX_FIELDS else v) for k, v in raw.items()}
            try:
                terms.append(TERM_TYPES[tag](**kw))
            except TypeError as exc:
                raise ValueError(f"terms[{i}]: {exc}") from None
        return cls(tuple(terms), units=data.get("units", "g"))


def _encode_number(v):
    v = complex(v)
    if v.imag == 0:
        return v.real
    return [v.real, v.imag]


def _decode_number(v):
    if isinstance(v, (list, tuple)):
        re, im = v
        return complex(re, im)
    if isinstance(v, dict):
        return complex(v.get("re", 0.0), v.get("im", 0.0))
    return v


@lru_cache(maxsize=32)
def _term_matrix(term, space: FockSpace) -> np.ndarray:
    # terms are frozen, so along a sweep only the varied one is rebuilt
    m = term.matrix(space)
    m.setflags(write=False)
    return m


def assemble(space: FockSpace, spec: HamiltonianSpec) -> Operator:
    total = np.zeros((space.dim, space.dim), dtype=np.complex128)
    for t in spec.terms:
        total += _term_matrix(t, space)
    return Operator(space, total)


def build_h1(space: FockSpace, g: float, eps: float, kappa: float) -> Operator:
    """PT-symmetric driven pair: quadrature drive ``eps (i a - i a+)`` on both modes."""
    for name, v in (("g", g), ("eps", eps), ("kappa", kappa)):
        _finite(name, v)
    a, b, ad, bd = _two_mode(space)
    return (
        g * (ad @ b + bd @ a)
        + (1j * eps) * (a - ad)
        + (1j * eps) * (b - bd)
        - (1j * kappa) * (ad @ a)
        + (1j * kappa) * (bd @ b)
    )


def build_h2(space: FockSpace, g: float, eps: float, kappa: float) -> Operator:
    """Same as :func:`build_h1` but with the in-phase drive ``eps (a + a+)``."""
    for name, v in (("g", g), ("eps", eps), ("kappa", kappa)):
        _finite(name, v)
    a, b, ad, bd = _two_mode(space)
    return (
        g * (ad @ b + bd @ a)
        + eps * (a + ad)
        + eps * (b + bd)
        - (1j * kappa) * (ad @ a)
        + (1j * kappa) * (bd @ b)
    )


def build_h3(
    space: FockSpace, delta: float, g: complex, eps: float, phi: float, kappa: float
) -> Operator:
    """Detuned pair with complex coupling and drive phase ``phi``."""
    for name, v in (("delta", delta), ("g", g), ("eps", eps), ("phi", phi), ("kappa", kappa)):
        _finite(name, v)
    a, b, ad, bd = _two_mode(space)
    g = complex(g)
    z = eps * cmath.exp(1j * phi)
    return (
        delta * (ad @ a + bd @ b)
        + g * (ad @ b)
        + g.conjugate() * (bd @ a)
        + z * a
        + z.conjugate() * ad
        + z * b
        + z.conjugate() * bd
        - (1j * kappa) * (ad @ a)
        + (1j * kappa) * (bd @ b)
    )


def build_table_term(
    space: FockSpace, kind: str, order: int, coefficient: complex = 1.0, phi: float = 0.0
) -> Operator:
    return TableTerm(kind, order, coefficient, phi).operator(space)


def h1_spec(g: float, eps: float, kappa: float) -> HamiltonianSpec:
    return HamiltonianSpec((LinearCoupling(g), DriveH1(eps), GainLoss(kappa)))


def h2_spec(g: float, eps: float, kappa: float) -> HamiltonianSpec:
    return HamiltonianSpec((LinearCoupling(g), DrivePhased(eps, 0.0), GainLoss(kappa)))


def h3_spec(delta: float, g: complex, eps: float, phi: float, kappa: float) -> HamiltonianSpec:
    return HamiltonianSpec((Detuning(delta), LinearCoupling(g), DrivePhased(eps, phi), GainLoss(kappa)))


def quadratic_parameters(spec: HamiltonianSpec):
    """Return ``(g, eps, kappa)`` when ``spec`` is an H1/H2-type model, else ``None``.

    The closed-form spectrum covers real positive coupling, one drive of any
    phase (a rotation by the total number operator removes it) and gain/loss.
    """
    g = eps = kappa = None
    for t in spec.terms:
        if isinstance(t, LinearCoupling):
            gc = complex(t.g)
            if gc.imag != 0 or gc.real <= 0 or g is not None:
                return None
            g = gc.real
        elif isinstance(t, (DriveH1, DrivePhased)):
            if eps is not None:
                return None
            eps = float(t.eps)
        elif isinstance(t, GainLoss):
            if kappa is not None:
                return None
            kappa = float(t.kappa)
        elif isinstance(t, Detuning) and t.delta == 0:
            continue
        else:
            return None
    if g is None:
        return None
    return g, eps or 0.0, kappa or 0.0
