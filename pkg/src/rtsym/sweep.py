"""Parameter sweeps over a Hamiltonian template and their serialisation.

Config files are JSON::

    {
      "hamiltonian": {"terms": [{"type": "LinearCoupling", "g": 1.0},
                                {"type": "DrivePhased", "eps": 0.1, "phi": 0.0},
                                {"type": "GainLoss", "kappa": 0.0}]},
      "sweep": {"parameter": "kappa", "lo": 0.0, "hi": 2.0, "steps": 201},
      "cutoff": 12,
      "tolerances": {"symmetry": 1e-10, "classification": 1e-8, "ep": 1e-6},
      "outputs": {"format": "csv", "path": "fig3.csv"},
      "rt_theta": null,
      "workers": 1
    }

``sweep.parameter`` is either a bare parameter name (set on every term that
carries it) or ``terms.<i>.<name>``.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import csv
import io
import json
import math
import os

import numpy as np

from .fock import FockSpace
from .hamiltonians import HamiltonianSpec, assemble, h1_spec, h2_spec, quadratic_parameters
from .spectral import (
    DEFAULT_CLASS_TOL,
    TRACKED_LEVELS,
    EigensolverError,
    SpectrumClass,
    analytic_spectrum,
    conserves_total_number,
    eigenspectrum,
    locate_ep,
    low_sector_indices,
    single_excitation_block,
    sort_spectrum,
    track_branches,
)
from .symmetry import DEFAULT_TOL, find_rt_angle, is_symmetric, pt_spec, rt_spec

CSV_HEADER = (
    "index,kappa,lambda_re,lambda_im,lambda0_re,lambda0_im,"
    "E0_re,E0_im,Ep_re,Ep_im,Em_re,Em_im,class,min_angle,cond,singular"
)
SINGULAR = "SINGULAR"
NOT_APPLICABLE = "NA"
PRESETS = ("fig2", "fig3")
DEFAULT_STEPS = 201


class ConfigError(ValueError):
    """Invalid sweep configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class NumericalFailure(RuntimeError):
    """A grid point could not be evaluated."""


@dataclass(frozen=True)
class SweepConfig:
    hamiltonian: HamiltonianSpec
    parameter: str = "kappa"
    lo: float = 0.0
    hi: float = 2.0
    steps: int = DEFAULT_STEPS
    cutoff: int = 12
    tol_symmetry: float = DEFAULT_TOL
    tol_classification: float = DEFAULT_CLASS_TOL
    tol_ep: float = 1e-6
    format: str = "csv"
    path: str | None = None
    preset: str | None = None
    rt_theta: float | None = None
    workers: int = 1

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)) or not self.lo < self.hi:
            raise ConfigError("sweep.lo", f"need finite lo < hi, got {self.lo}, {self.hi}")
        if isinstance(self.steps, bool) or not isinstance(self.steps, int) or self.steps < 2:
            raise ConfigError("sweep.steps", f"need an integer >= 2, got {self.steps!r}")
        if isinstance(self.cutoff, bool) or not isinstance(self.cutoff, int) or self.cutoff < 1:
            raise ConfigError("cutoff", f"need an integer >= 1, got {self.cutoff!r}")
        for name in ("tol_symmetry", "tol_classification", "tol_ep"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0):
                raise ConfigError(f"tolerances.{name[4:]}", f"need a positive number, got {v!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError("outputs.format", f"need 'csv' or 'json', got {self.format!r}")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError("workers", f"need an integer >= 1, got {self.workers!r}")
        try:
            self.hamiltonian.with_parameter(self.parameter, self.lo)
        except KeyError as exc:
            raise ConfigError("sweep.parameter", str(exc.args[0])) from None
        except (TypeError, ValueError) as exc:
            raise ConfigError("sweep.parameter", str(exc)) from None

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)

    @classmethod
    def from_dict(cls, data: dict) -> SweepConfig:
        if not isinstance(data, dict):
            raise ConfigError("<root>", "config must be a JSON object")
        if "hamiltonian" not in data:
            raise ConfigError("hamiltonian", "missing")
        try:
            ham = HamiltonianSpec.from_dict(data["hamiltonian"])
        except (TypeError, ValueError) as exc:
            raise ConfigError("hamiltonian", str(exc)) from None
        sweep = data.get("sweep", {})
        tols = data.get("tolerances", {})
        outputs = data.get("outputs", {})
        for name, section in (("sweep", sweep), ("tolerances", tols), ("outputs", outputs)):
            if not isinstance(section, dict):
                raise ConfigError(name, "must be an object")
        kw = dict(
            hamiltonian=ham,
            parameter=sweep.get("parameter", "kappa"),
            lo=_number("sweep.lo", sweep.get("lo", 0.0)),
            hi=_number("sweep.hi", sweep.get("hi", 2.0)),
            steps=sweep.get("steps", DEFAULT_STEPS),
            cutoff=data.get("cutoff", 12),
            tol_symmetry=tols.get("symmetry", DEFAULT_TOL),
            tol_classification=tols.get("classification", DEFAULT_CLASS_TOL),
            tol_ep=tols.get("ep", 1e-6),
            format=outputs.get("format", "csv"),
            path=outputs.get("path"),
            preset=data.get("preset"),
            rt_theta=data.get("rt_theta"),
            workers=data.get("workers", 1),
        )
        return cls(**kw)

    def to_dict(self) -> dict:
        return {
            "hamiltonian": self.hamiltonian.to_dict(),
            "sweep": {"parameter": self.parameter, "lo": self.lo, "hi": self.hi, "steps": self.steps},
            "cutoff": self.cutoff,
            "tolerances": {
                "symmetry": self.tol_symmetry,
                "classification": self.tol_classification,
                "ep": self.tol_ep,
            },
            "outputs": {"format": self.format, "path": self.path},
            "preset": self.preset,
            "rt_theta": self.rt_theta,
            "workers": self.workers,
        }


def _number(path, v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(path, f"need a number, got {v!r}")
    return float(v)


def preset_config(name: str, eps: float = 0.1, g: float = 1.0, cutoff: int = 12, steps: int = DEFAULT_STEPS) -> SweepConfig:
    """``fig2``: undriven quadrature-drive model; ``fig3``: in-phase drive of strength ``eps``.

    Both sweep ``kappa`` over ``[0, 2 g]``.
    """
    if name == "fig2":
        ham = h1_spec(g, 0.0, 0.0)
    elif name == "fig3":
        ham = h2_spec(g, eps, 0.0)
    else:
        raise ConfigError("preset", f"unknown preset {name!r}; choose from {PRESETS}")
    label = name if name == "fig2" else f"fig3_eps({eps!r})"
    return SweepConfig(ham, "kappa", 0.0, 2.0 * g, steps, cutoff, preset=label)


def _c(z):
    return None if z is None else complex(z)


@dataclass(frozen=True)
class AnalyticRow:
    lam: complex
    lam0: complex | None
    e0: complex | None
    ep: complex | None
    em: complex | None
    singular: bool


@dataclass(frozen=True)
class SweepRow:
    index: int
    value: float
    analytic: AnalyticRow | None
    numeric: tuple  # tracked (E-, E0, E+)
    classification: str
    min_angle: float
    cond: float
    symmetry: tuple = ()

    @property
    def singular(self) -> bool:
        return self.classification == SpectrumClass.SINGULAR.value or bool(
            self.analytic and self.analytic.singular
        )

    def to_dict(self, parameter: str = "kappa") -> dict:
        a = self.analytic
        return {
            "record": "row",
            "index": self.index,
            "parameter": parameter,
            "value": self.value,
            "analytic": None
            if a is None
            else {
                "lambda": _enc(a.lam),
                "lambda0": _enc(a.lam0),
                "E0": _enc(a.e0),
                "Ep": _enc(a.ep),
                "Em": _enc(a.em),
                "singular": a.singular,
            },
            "numeric": {k: _enc(z) for k, z in zip(("Em", "E0", "Ep"), self.numeric)},
            "class": self.classification,
            "min_angle": _enc_real(self.min_angle),
            "cond": _enc_real(self.cond),
            "symmetry": [dict(s) for s in self.symmetry],
        }

    @classmethod
    def from_dict(cls, d: dict) -> SweepRow:
        a = d["analytic"]
        analytic = None
        if a is not None:
            analytic = AnalyticRow(
                _dec(a["lambda"]), _dec(a["lambda0"]), _dec(a["E0"]), _dec(a["Ep"]), _dec(a["Em"]), a["singular"]
            )
        num = d["numeric"]
        return cls(
            d["index"],
            d["value"],
            analytic,
            tuple(_dec(num[k]) for k in ("Em", "E0", "Ep")),
            d["class"],
            _dec_real(d["min_angle"]),
            _dec_real(d["cond"]),
            tuple(d["symmetry"]),
        )


def _enc(z):
    if z is None:
        return SINGULAR
    z = complex(z)
    return [z.real, z.imag]


def _dec(v):
    if v == SINGULAR:
        return None
    return complex(v[0], v[1])


def _enc_real(x):
    return x if math.isfinite(x) else SINGULAR


def _dec_real(v):
    return math.inf if v == SINGULAR else v


@dataclass
class SweepResult:
    config: SweepConfig
    rows: list = field(default_factory=list)
    eps: list = field(default_factory=list)
    rt_theta: float | None = None

    def footer(self) -> dict:
        return {
            "record": "footer",
            "ep": [
                {"kappa": e.kappa, "lo": e.lo, "hi": e.hi, "block_exact": e.block_exact, "caveat": e.caveat}
                for e in self.eps
            ],
            "rt_theta": self.rt_theta,
        }


@dataclass(frozen=True)
class _Point:
    analytic: AnalyticRow | None
    eigenvalues: np.ndarray
    classification: str
    min_angle: float
    cond: float
    symmetry: tuple


def _evaluate(config: SweepConfig, space: FockSpace, value: float, theta) -> _Point:
    spec = config.hamiltonian.with_parameter(config.parameter, value)
    h = assemble(space, spec)

    analytic = None
    quad = quadratic_parameters(spec)
    if quad is not None:
        g, eps, kappa = quad
        an = analytic_spectrum(g, kappa, eps, TRACKED_LEVELS)
        analytic = AnalyticRow(_c(an.lam), _c(an.lam0), _c(an.e0), _c(an.e_plus), _c(an.e_minus), an.singular)

    try:
        if conserves_total_number(h):
            # number-conserving: the tracked levels live in the N <= 1 sector
            eigs = np.linalg.eigvals(h.block(low_sector_indices(space, 1)))
        else:
            eigs = np.linalg.eigvals(h.matrix)
        if not np.all(np.isfinite(eigs)):
            raise EigensolverError("non-finite eigenvalues")
        block = eigenspectrum(single_excitation_block(h), config.tol_classification)
    except (np.linalg.LinAlgError, EigensolverError) as exc:
        raise NumericalFailure(f"eigensolve failed at {config.parameter}={value!r}: {exc}") from exc

    certs = [is_symmetric(h, pt_spec(space), config.tol_symmetry).record()]
    if theta is not None:
        certs.append(is_symmetric(h, rt_spec(space, theta), config.tol_symmetry).record())
    return _Point(
        analytic,
        sort_spectrum(eigs),
        block.classification.kind.value,
        block.coalescence.min_angle,
        block.coalescence.condition,
        tuple(certs),
    )


def _seeds(point: _Point) -> list:
    a = point.analytic
    if a is not None and not any(z is None for z in (a.em, a.e0, a.ep)):
        return [a.em, a.e0, a.ep]
    low = point.eigenvalues[np.argsort(np.abs(point.eigenvalues), kind="stable")][:3]
    return sorted(low, key=lambda z: (z.real, z.imag))


def run_sweep(config: SweepConfig) -> SweepResult:
    space = FockSpace(2, config.cutoff)
    grid = config.grid
    theta = config.rt_theta
    if theta is None:
        h0 = assemble(space, config.hamiltonian.with_parameter(config.parameter, float(grid[0])))
        theta = find_rt_angle(h0, config.tol_symmetry)

    def work(v):
        return _evaluate(config, space, float(v), theta)

    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            points = list(pool.map(work, grid))
    else:
        points = [work(v) for v in grid]

    anchors = [
        None if p.analytic is None else [p.analytic.em, p.analytic.e0, p.analytic.ep] for p in points
    ]
    if any(a is None for a in anchors):
        anchors = None
    tracked = track_branches([p.eigenvalues for p in points], _seeds(points[0]), anchors)

    result = SweepResult(config, rt_theta=theta)
    result.eps = _locate_eps(config, points, grid)
    for i, (v, p) in enumerate(zip(grid, points)):
        cls = p.classification
        if any(abs(v - e.kappa) <= config.tol_ep for e in result.eps):
            cls = SpectrumClass.SINGULAR.value
        result.rows.append(
            SweepRow(i, float(v), p.analytic, tuple(complex(z) for z in tracked[i]), cls, p.min_angle, p.cond, p.symmetry)
        )
    return result


def _locate_eps(config, points, grid) -> list:
    """Refine every real/paired change of the single-excitation block along a kappa sweep."""
    quad = quadratic_parameters(config.hamiltonian)
    if config.parameter != "kappa" or quad is None:
        return []
    g, eps, _ = quad
    phases = (SpectrumClass.ALL_REAL.value, SpectrumClass.CONJUGATE_PAIRED.value)
    # rows exactly at the EP classify unreliably; bracket between definite ones
    labelled = [i for i, p in enumerate(points) if p.classification in phases]
    out = []
    for i, j in zip(labelled, labelled[1:]):
        if points[i].classification != points[j].classification:
            loc = locate_ep(g, eps, float(grid[i]), float(grid[j]), config.tol_ep, config.tol_classification)
            if not any(abs(loc.kappa - e.kappa) <= config.tol_ep for e in out):
                out.append(loc)
    return out


def _fmt(x: float) -> str:
    return format(float(x) + 0.0, ".17g")


def _csv_complex(z, singular_ok: bool):
    if z is None:
        return [SINGULAR, SINGULAR] if singular_ok else [NOT_APPLICABLE, NOT_APPLICABLE]
    return [_fmt(z.real), _fmt(z.imag)]


def csv_fields(row: SweepRow) -> list:
    a = row.analytic
    cells = [str(row.index), _fmt(row.value)]
    if a is None:
        cells += [NOT_APPLICABLE] * 10
    else:
        for z in (a.lam, a.lam0, a.e0, a.ep, a.em):
            cells += _csv_complex(z, True)
    cells.append(row.classification)
    cells += [_fmt(x) if math.isfinite(x) else SINGULAR for x in (row.min_angle, row.cond)]
    cells.append(SINGULAR if row.singular else "")
    return cells


def render(result_or_rows, fmt: str = "csv", parameter: str = "kappa") -> str:
    """Serialise rows (and the footer when given a :class:`SweepResult`)."""
    if isinstance(result_or_rows, SweepResult):
        rows, footer = result_or_rows.rows, result_or_rows.footer()
        parameter = result_or_rows.config.parameter
    else:
        rows, footer = list(result_or_rows), None
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(CSV_HEADER + "\n")
        writer = csv.writer(buf, lineterminator="\n")
        for r in rows:
            writer.writerow(csv_fields(r))
        if footer is not None:
            for e in footer["ep"]:
                buf.write(f"# ep kappa={_fmt(e['kappa'])} lo={_fmt(e['lo'])} hi={_fmt(e['hi'])} "
                          f"block_exact={str(e['block_exact']).lower()}\n")
        return buf.getvalue()
    if fmt == "json":
        records = [r.to_dict(parameter) for r in rows]
        if footer is not None:
            records.append(footer)
        return json.dumps(records, indent=1, allow_nan=False) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit(result_or_rows, fmt: str, path) -> str:
    text = render(result_or_rows, fmt)
    path = os.fspath(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def parse_rows(text: str, fmt: str = "json") -> list:
    if fmt != "json":
        raise ValueError("only JSON output can be parsed back into rows")
    return [SweepRow.from_dict(d) for d in json.loads(text) if d.get("record") == "row"]


def with_overrides(config: SweepConfig, params: dict) -> SweepConfig:
    """Apply ``--param`` style overrides to a config."""
    top = {"lo": "lo", "hi": "hi", "steps": "steps", "cutoff": "cutoff",
           "sweep.lo": "lo", "sweep.hi": "hi", "sweep.steps": "steps", "sweep.parameter": "parameter",
           "rt_theta": "rt_theta", "workers": "workers"}
    ham = config.hamiltonian
    changes = {}
    for key, value in params.items():
        if key in top:
            changes[top[key]] = value
            continue
        try:
            ham = ham.with_parameter(key, value)
        except KeyError as exc:
            raise ConfigError(f"param.{key}", str(exc.args[0])) from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"param.{key}", str(exc)) from None
    return replace(config, hamiltonian=ham, **changes)
