"""Eigen-decomposition, spectrum classification and exceptional-point tools."""
from __future__ import annotations

from dataclasses import dataclass, field
import cmath
import enum
import math

import numpy as np
from scipy.optimize import bisect, linear_sum_assignment

from .fock import FockSpace, Operator
from .hamiltonians import build_h1

DEFAULT_CLASS_TOL = 1e-8
TRACKED_LEVELS = (-1, 0, 1)


class EigensolverError(ArithmeticError):
    """Dense eigensolver failed or produced non-finite output."""


class SingularPointError(ArithmeticError):
    """Requested quantity diverges at the exceptional point."""


class SpectrumClass(str, enum.Enum):
    ALL_REAL = "REAL"
    CONJUGATE_PAIRED = "PAIRED"
    MIXED = "MIXED"
    SINGULAR = "SINGULAR"


@dataclass(frozen=True)
class Classification:
    kind: SpectrumClass
    real: tuple = ()
    pairs: tuple = ()
    unpaired: tuple = ()
    threshold: float = 0.0


@dataclass(frozen=True)
class Coalescence:
    min_angle: float
    condition: float


@dataclass(frozen=True, eq=False)
class SpectrumReport:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    classification: Classification
    coalescence: Coalescence


def _as_matrix(h) -> np.ndarray:
    m = h.matrix if isinstance(h, Operator) else np.asarray(h, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"need a square matrix, got shape {m.shape}")
    return m


def sort_spectrum(values, vectors=None):
    order = np.lexsort((values.imag, values.real))
    if vectors is None:
        return values[order]
    return values[order], vectors[:, order]


def eigenspectrum(h, tol: float = DEFAULT_CLASS_TOL) -> SpectrumReport:
    """Full eigendecomposition sorted by real then imaginary part."""
    m = _as_matrix(h)
    if not np.all(np.isfinite(m)):
        raise EigensolverError("matrix has non-finite entries")
    try:
        w, v = np.linalg.eig(m)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolver did not converge: {exc}") from exc
    if not (np.all(np.isfinite(w)) and np.all(np.isfinite(v))):
        raise EigensolverError("eigensolver returned non-finite values")
    v = v / np.linalg.norm(v, axis=0)
    w, v = sort_spectrum(w, v)
    return SpectrumReport(w, v, classify_spectrum(w, tol), coalescence_measure(v))


def classify_spectrum(eigs, tol: float = DEFAULT_CLASS_TOL, scale: float = 0.0) -> Classification:
    """Split a spectrum into real values and complex-conjugate pairs.

    ``tol`` is relative to the spectral radius, or to ``scale`` when that is
    larger. Passing a matrix norm as ``scale`` keeps the threshold from
    collapsing near an exceptional point, where the spectral radius can vanish
    while rounding noise in the eigenvalues does not. Non-real values are
    sorted by real part and each one with positive imaginary part is matched
    greedily to the nearest unmatched conjugate partner.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    e = np.asarray(eigs, dtype=np.complex128).ravel()
    if e.size == 0:
        return Classification(SpectrumClass.ALL_REAL)
    thr = tol * max(float(np.max(np.abs(e))), float(scale))
    real = tuple(int(i) for i in np.flatnonzero(np.abs(e.imag) <= thr))
    cx = [int(i) for i in np.flatnonzero(np.abs(e.imag) > thr)]
    if not cx:
        return Classification(SpectrumClass.ALL_REAL, real, threshold=thr)
    cx.sort(key=lambda i: (e[i].real, e[i].imag))
    upper = [i for i in cx if e[i].imag > 0]
    lower = [i for i in cx if e[i].imag < 0]
    pairs, unpaired = [], []
    for i in upper:
        if lower:
            dist = [abs(e[i].conjugate() - e[j]) for j in lower]
            k = int(np.argmin(dist))
            if dist[k] <= thr:
                pairs.append((i, lower.pop(k)))
                continue
        unpaired.append(i)
    unpaired.extend(lower)
    kind = SpectrumClass.MIXED if unpaired else SpectrumClass.CONJUGATE_PAIRED
    return Classification(kind, real, tuple(pairs), tuple(sorted(unpaired)), thr)


def coalescence_measure(vectors) -> Coalescence:
    """Smallest pairwise angle between eigenvectors and their condition number.

    Both flag an exceptional point: the angle drops to zero and the
    condition number diverges as eigenvectors become parallel.
    """
    if isinstance(vectors, SpectrumReport):
        vectors = vectors.eigenvectors
    v = np.asarray(vectors, dtype=np.complex128)
    n = v.shape[1]
    if n < 2:
        return Coalescence(math.pi / 2, 1.0)
    u = v / np.linalg.norm(v, axis=0)
    overlap = np.abs(u.conj().T @ u)
    np.fill_diagonal(overlap, 0.0)
    min_angle = float(np.arccos(np.clip(overlap.max(), 0.0, 1.0)))
    cond = float(np.linalg.cond(v))
    return Coalescence(min_angle, cond if math.isfinite(cond) else math.inf)


def characteristic_polynomial(h) -> np.ndarray:
    """Coefficients ``[1, c1, ..., cn]`` of ``det(x I - H)`` via Faddeev-LeVerrier.

    Independent of the eigensolver; only well conditioned for small matrices.
    """
    m = _as_matrix(h)
    n = m.shape[0]
    coeffs = np.zeros(n + 1, dtype=np.complex128)
    coeffs[0] = 1.0
    work = np.zeros_like(m)
    eye = np.eye(n)
    for k in range(1, n + 1):
        work = m @ work + coeffs[k - 1] * eye
        coeffs[k] = -np.trace(m @ work) / k
    return coeffs


@dataclass(frozen=True)
class AnalyticSpectrum:
    """Closed-form levels ``n * lam + lam0`` of the driven gain/loss pair.

    At the branch point (``kappa == g``) ``singular`` is set; ``lam0`` and the
    levels are then ``None`` unless the drive is off, where they stay 0.
    """

    g: float
    kappa: float
    eps: float
    lam: complex
    lam0: complex | None
    levels: dict
    singular: bool

    @property
    def e0(self):
        return self.levels.get(0)

    @property
    def e_plus(self):
        return self.levels.get(1)

    @property
    def e_minus(self):
        return self.levels.get(-1)


def branch_lambda(g: float, kappa: float) -> complex:
    """Principal root of ``g^2 - kappa^2``: positive real below the EP, ``+i`` above."""
    return cmath.sqrt(complex(g * g - kappa * kappa, 0.0))


def analytic_spectrum(g: float, kappa: float, eps: float, n_range=TRACKED_LEVELS) -> AnalyticSpectrum:
    for name, v in (("g", g), ("kappa", kappa), ("eps", eps)):
        if not math.isfinite(v):
            raise ValueError(f"{name} must be finite")
    lam2 = g * g - kappa * kappa
    lam = branch_lambda(g, kappa)
    if lam2 == 0:
        if eps == 0:
            return AnalyticSpectrum(g, kappa, eps, 0j, 0j, {n: 0j for n in n_range}, True)
        return AnalyticSpectrum(g, kappa, eps, 0j, None, {n: None for n in n_range}, True)
    lam0 = complex(-2.0 * g * eps * eps / lam2)
    levels = {n: n * lam + lam0 for n in n_range}
    return AnalyticSpectrum(g, kappa, eps, lam, lam0, levels, False)


def single_excitation_indices(space: FockSpace) -> np.ndarray:
    return np.array([space.index((1, 0)), space.index((0, 1))])


def single_excitation_block(h: Operator) -> np.ndarray:
    """2x2 block of ``h`` on ``{|10>, |01>}``; exact for undriven quadratic models."""
    return h.block(single_excitation_indices(h.space))


def conserves_total_number(h: Operator, tol: float = 0.0) -> bool:
    ntot = h.space.total_number
    off = ntot[:, None] != ntot[None, :]
    return bool(np.max(np.abs(h.matrix[off]), initial=0.0) <= tol)


def low_sector_indices(space: FockSpace, max_total: int = 1) -> np.ndarray:
    return np.flatnonzero(space.total_number <= max_total)


@dataclass(frozen=True)
class EPLocation:
    kappa: float
    lo: float
    hi: float
    block_exact: bool

    @property
    def caveat(self) -> str | None:
        if self.block_exact:
            return None
        return "located on the single-excitation block; the driven model only approximates it"


_EP_SPACE = FockSpace(2, 1)


def _block_phase(g, eps, kappa, tol):
    block = single_excitation_block(build_h1(_EP_SPACE, g, eps, kappa))
    return classify_spectrum(np.linalg.eigvals(block), tol, np.linalg.norm(block, 2)).kind


def locate_ep(
    g: float,
    eps: float,
    kappa_lo: float,
    kappa_hi: float,
    tol_kappa: float = 1e-6,
    class_tol: float = DEFAULT_CLASS_TOL,
) -> EPLocation:
    """Bisect the real/paired boundary of the single-excitation block in ``kappa``."""
    if not kappa_lo < kappa_hi:
        raise ValueError("need kappa_lo < kappa_hi")
    lo_kind = _block_phase(g, eps, kappa_lo, class_tol)
    hi_kind = _block_phase(g, eps, kappa_hi, class_tol)
    if lo_kind == hi_kind:
        raise ValueError(
            f"interval [{kappa_lo}, {kappa_hi}] does not bracket a phase change "
            f"(both ends {lo_kind.value})"
        )

    def side(kappa):
        return 1.0 if _block_phase(g, eps, kappa, class_tol) == lo_kind else -1.0

    kappa = bisect(side, kappa_lo, kappa_hi, xtol=tol_kappa / 4, rtol=4 * np.finfo(float).eps)
    return EPLocation(float(kappa), float(kappa_lo), float(kappa_hi), eps == 0)


@dataclass(frozen=True)
class Splitting:
    exact: float
    approx: float

    @property
    def relative_gap(self) -> float:
        if self.exact == 0:
            return 0.0
        return abs(self.exact - self.approx) / self.exact


def splitting_law(g: float, kappa: float) -> Splitting:
    """Level splitting ``E+ - E0`` just below the EP and its square-root approximation."""
    dg = g - kappa
    if dg < 0:
        raise ValueError("splitting law needs kappa <= g")
    return Splitting(math.sqrt(dg * (g + kappa)), math.sqrt(2.0 * kappa * dg))


def match_levels(candidates, targets) -> np.ndarray:
    """Assign each target a distinct candidate minimising the total distance."""
    c = np.asarray(candidates, dtype=np.complex128)
    t = np.asarray(targets, dtype=np.complex128)
    cost = np.abs(t[:, None] - c[None, :])
    rows, cols = linear_sum_assignment(cost)
    out = np.empty(len(t), dtype=np.complex128)
    out[rows] = c[cols]
    return out


def track_branches(spectra, seeds, anchors=None) -> np.ndarray:
    """Continue ``len(seeds)`` eigenvalue branches through a list of spectra.

    At each step the branch prediction is the anchor when one is given (and
    finite), else a linear extrapolation from the two previous points. The
    branches are then matched to distinct eigenvalues with minimal total
    distance.
    """
    seeds = np.asarray(seeds, dtype=np.complex128)
    nb = len(seeds)
    out = np.empty((len(spectra), nb), dtype=np.complex128)
    for s, eigs in enumerate(spectra):
        if s == 0:
            pred = seeds.copy()
        elif s == 1:
            pred = out[0].copy()
        else:
            pred = 2 * out[s - 1] - out[s - 2]
        if anchors is not None:
            for k in range(nb):
                a = anchors[s][k]
                if a is not None and cmath.isfinite(a):
                    pred[k] = a
        out[s] = match_levels(eigs, pred)
    return out
