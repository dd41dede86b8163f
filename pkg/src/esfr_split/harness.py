"""Configuration-driven experiments.

Three studies are available:

* ``energy``: long-time broken Sobolev energy and conservation histories
  for a list of schemes and fluxes, with a Yes/No classification table.
* ``ooa``: grid refinement against a manufactured solution.
* ``sbp-check``: operator identities over a grid of degrees, volume rules
  and correction parameters.

Configurations are flat ``key = value`` text files. Keys left out take the
defaults of the selected study.
"""

from __future__ import annotations

import csv
import logging
import math
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import numpy.linalg as la

from esfr_split.diagnostics import (
    conserved_quantity,
    is_monotone_nonincreasing,
    l2_error,
    modal_energy,
    ooa_slopes,
)
from esfr_split.fluxes import FluxKind
from esfr_split.mesh import Mesh1D
from esfr_split.operators import (
    build_basis,
    build_operators,
    c_hu,
    c_plus,
    dense_filter_inverse,
    filter_inverse_residual,
    relative_kd_defect,
    sherman_morrison_filter_inverse,
    verify_sbp,
)
from esfr_split.schemes import (
    Discretization,
    SchemeConfig,
    SolutionField,
    Variant,
    VolumeRule,
)
from esfr_split.timestepping import DivergenceError, TimeLoopConfig, integrate

logger = logging.getLogger(__name__)

SpaceTimeFunction = Callable[[np.ndarray, float], np.ndarray]

#: relative energy change below which a run counts as energy conserving
ENERGY_CONSERVATION_TOL = 1.0e-11
#: relative growth between samples tolerated by the monotonicity check
MONOTONE_TOL = 1.0e-10
#: a run has diverged once its energy exceeds this multiple of the initial one
DIVERGENCE_FACTOR = 1.0e6
#: L2 errors below this are indistinguishable from rounding
ROUNDOFF_ERROR = 1.0e-14

FLOAT_FORMAT = "{:.15e}"

STUDIES = ("energy", "ooa", "sbp-check")

ENERGY_CSV_HEADER = ("t", "energy", "energy_rel", "conserved_drift")
SUMMARY_CSV_HEADER = ("scheme", "flux", "c", "quadrature", "conserved", "monotone")
OOA_CSV_HEADER = ("dx", "l2_error", "ooa")


class ConfigError(ValueError):
    """Invalid experiment configuration."""


# {{{ named data


def sine_offset(x: np.ndarray, t: float = 0.0) -> np.ndarray:
    return np.sin(np.pi * x) + 0.01


def cosine(x: np.ndarray, t: float = 0.0) -> np.ndarray:
    return np.cos(np.pi * x)


def constant(x: np.ndarray, t: float = 0.0) -> np.ndarray:
    return np.ones_like(np.asarray(x, dtype=np.float64))


def manufactured_solution(x: np.ndarray, t: float) -> np.ndarray:
    return np.cos(np.pi * (x - t))


def manufactured_source(x, t):
    r"""Forcing that makes :math:`\cos(\pi (x - t))` solve Burgers' equation."""
    arg = np.pi * (np.asarray(x) - t)
    return np.pi * np.sin(arg) * (1.0 - np.cos(arg))


INITIAL_CONDITIONS: dict[str, SpaceTimeFunction] = {
    "sine_offset": sine_offset,
    "cosine": cosine,
    "constant": constant,
}

SOURCES: dict[str, SpaceTimeFunction | None] = {
    "none": None,
    "manufactured": manufactured_source,
}

# exact solutions for (initial condition, source) pairs
EXACT_SOLUTIONS: dict[tuple[str, str], SpaceTimeFunction] = {
    ("cosine", "manufactured"): manufactured_solution,
    ("constant", "none"): constant,
}


def initial_project(ic: SpaceTimeFunction, disc: Discretization) -> SolutionField:
    r"""L2 projection :math:`\hat{u}_m = \Pi\, u_0(x_v)` at the scheme's volume nodes."""
    u0 = ic(disc.x_volume, 0.0) @ disc.ops.Pi.T
    return disc.field(u0, 0.0)


# }}}


# {{{ configuration


@dataclass(frozen=True)
class SchemeSpec:
    """A scheme variant with a named or numeric correction parameter."""

    variant: Variant
    c_label: str = "c_DG"

    @classmethod
    def parse(cls, token: str) -> SchemeSpec:
        name, _, c_label = token.partition(":")
        try:
            variant = Variant.parse(name)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

        c_label = c_label.strip() or "c_DG"
        if c_label not in ("c_DG", "c+", "c_HU"):
            try:
                float(c_label)
            except ValueError:
                raise ConfigError(f"unknown correction parameter: {c_label!r}") from None
        return cls(variant, c_label)

    @property
    def label(self) -> str:
        return f"{self.variant.value}:{self.c_label}"

    def resolve_c(self, p: int, c_plus_values: Mapping[int, float]) -> float:
        if self.c_label == "c_DG":
            return 0.0
        if self.c_label == "c_HU":
            return c_hu(p)
        if self.c_label == "c+":
            if p in c_plus_values:
                return c_plus_values[p]
            try:
                return c_plus(p)
            except ValueError as exc:
                raise ConfigError(str(exc)) from None
        return float(self.c_label)


_STUDY_DEFAULTS: dict[str, dict[str, str]] = {
    "energy": {
        "degrees": "4,5",
        "schemes": (
            "ConsDGStrong,SplitStrong:c_DG,SplitStrong:c+,SplitStrong:1e4,"
            "ClassicalSplit:c+,ClassicalSplit:c_HU,LumpedLobatto"
        ),
        "fluxes": "ECON,LF",
        "volume_rule": "GL",
        "n_elements": "8",
        "t_final": "3",
        "initial_condition": "sine_offset",
        "source": "none",
    },
    "ooa": {
        "degrees": "4",
        "schemes": "ConsDGStrong,SplitStrong:c_DG,SplitStrong:c+,ClassicalSplit:c+",
        "fluxes": "LF",
        "volume_rule": "GL",
        "n_elements": "80,160,320,640,1280",
        "t_final": "1",
        "initial_condition": "cosine",
        "source": "manufactured",
    },
    "sbp-check": {
        "degrees": "1,2,3,4,5,6",
        "volume_rules": "GL,GLL,GL+2",
        "c_values": "0,1e4",
    },
}

_COMMON_DEFAULTS = {
    "x_left": "0",
    "x_right": "2",
    "dt": "1e-4",
    "record_every": "100",
    "alpha": str(2.0 / 3.0),
    "c_plus": "",
    "write_dat": "false",
}

_ALLOWED_KEYS = (
    set(_COMMON_DEFAULTS)
    | {"study", "volume_rules", "c_values"}
    | set(_STUDY_DEFAULTS["energy"])
)


def _split_list(value: str) -> list[str]:
    return [item.strip() for item in value.split(",") if item.strip()]


def _parse_bool(value: str) -> bool:
    key = value.strip().lower()
    if key in ("1", "true", "yes", "on"):
        return True
    if key in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {value!r}")


def _parse_c_plus(value: str) -> dict[int, float]:
    result = {}
    for item in _split_list(value):
        p, sep, c = item.partition(":")
        if not sep:
            raise ConfigError(f"c_plus entries look like 'p:value', got {item!r}")
        c_value = float(c)
        if c_value <= 0:
            raise ConfigError(f"c+ must be positive: {item!r}")
        result[int(p)] = c_value
    return result


@dataclass(frozen=True)
class ExperimentConfig:
    study: str
    degrees: tuple[int, ...]
    schemes: tuple[SchemeSpec, ...] = ()
    fluxes: tuple[FluxKind, ...] = ()
    volume_rule: VolumeRule = VolumeRule.GL
    volume_rules: tuple[VolumeRule, ...] = ()
    c_values: tuple[float, ...] = ()

    x_left: float = 0.0
    x_right: float = 2.0
    n_elements: tuple[int, ...] = (8,)

    dt: float = 1.0e-4
    t_final: float = 3.0
    record_every: int = 100

    alpha: float = 2.0 / 3.0
    initial_condition: str = "sine_offset"
    source: str = "none"
    c_plus: Mapping[int, float] = field(default_factory=dict)
    write_dat: bool = False

    @classmethod
    def from_mapping(cls, study: str, values: Mapping[str, str]) -> ExperimentConfig:
        if study not in STUDIES:
            raise ConfigError(f"unknown study: {study!r}")

        unknown = set(values) - _ALLOWED_KEYS
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(sorted(unknown))}")
        if values.get("study", study) != study:
            raise ConfigError(f"configuration is for study {values['study']!r}, not {study!r}")

        merged = {**_COMMON_DEFAULTS, **_STUDY_DEFAULTS[study], **values}
        get = merged.get

        try:
            cfg = cls(
                study=study,
                degrees=tuple(int(p) for p in _split_list(merged["degrees"])),
                schemes=tuple(SchemeSpec.parse(s) for s in _split_list(get("schemes", ""))),
                fluxes=tuple(FluxKind.parse(f) for f in _split_list(get("fluxes", ""))),
                volume_rule=VolumeRule.parse(get("volume_rule", "GL")),
                volume_rules=tuple(
                    VolumeRule.parse(r) for r in _split_list(get("volume_rules", ""))
                ),
                c_values=tuple(float(c) for c in _split_list(get("c_values", ""))),
                x_left=float(merged["x_left"]),
                x_right=float(merged["x_right"]),
                n_elements=tuple(int(m) for m in _split_list(get("n_elements", "8"))),
                dt=float(merged["dt"]),
                t_final=float(get("t_final", "0")),
                record_every=int(merged["record_every"]),
                alpha=float(merged["alpha"]),
                initial_condition=get("initial_condition", "sine_offset").strip(),
                source=get("source", "none").strip(),
                c_plus=_parse_c_plus(merged["c_plus"]),
                write_dat=_parse_bool(merged["write_dat"]),
            )
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

        cfg.validate()
        return cfg

    @classmethod
    def from_file(
        cls, study: str, path: str | Path, overrides: Iterable[str] = ()
    ) -> ExperimentConfig:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read configuration {path}: {exc}") from None

        values = parse_key_values(text.splitlines(), source=str(path))
        values.update(parse_key_values(overrides, source="--set"))
        return cls.from_mapping(study, values)

    def validate(self) -> None:
        if not self.degrees or any(p < 1 for p in self.degrees):
            raise ConfigError(f"degrees must be positive integers: {self.degrees}")
        if not self.x_right > self.x_left:
            raise ConfigError(f"empty domain: [{self.x_left}, {self.x_right}]")
        if any(m < 1 for m in self.n_elements):
            raise ConfigError(f"element counts must be positive: {self.n_elements}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ConfigError(f"split parameter outside [0, 1]: {self.alpha}")

        if self.study == "sbp-check":
            if not self.volume_rules or not self.c_values:
                raise ConfigError("sbp-check needs volume_rules and c_values")
            return

        if self.dt <= 0 or self.t_final < 0 or self.record_every < 1:
            raise ConfigError("need dt > 0, t_final >= 0 and record_every >= 1")
        if not self.schemes or not self.fluxes:
            raise ConfigError("need at least one scheme and one flux")
        if self.initial_condition not in INITIAL_CONDITIONS:
            raise ConfigError(f"unknown initial condition: {self.initial_condition!r}")
        if self.source not in SOURCES:
            raise ConfigError(f"unknown source: {self.source!r}")
        if self.study == "ooa":
            if (self.initial_condition, self.source) not in EXACT_SOLUTIONS:
                raise ConfigError(
                    "no exact solution for initial condition "
                    f"{self.initial_condition!r} with source {self.source!r}"
                )
            if len(self.n_elements) < 2:
                raise ConfigError("a refinement study needs at least two meshes")

    @property
    def time_loop(self) -> TimeLoopConfig:
        return TimeLoopConfig(self.dt, self.t_final, self.record_every)

    def mesh(self, n_elements: int) -> Mesh1D:
        return Mesh1D(self.x_left, self.x_right, n_elements)

    def scheme_config(
        self, spec: SchemeSpec, p: int, flux: FluxKind, volume_rule: VolumeRule | None = None
    ) -> SchemeConfig:
        return SchemeConfig(
            variant=spec.variant,
            p=p,
            c=spec.resolve_c(p, self.c_plus),
            alpha=self.alpha,
            flux=flux,
            volume_rule=self.volume_rule if volume_rule is None else volume_rule,
        )


def parse_key_values(lines: Iterable[str], *, source: str = "<config>") -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        values[key.strip()] = value.strip()
    return values


# }}}


# {{{ output


def format_float(value: float) -> str:
    return FLOAT_FORMAT.format(value)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as outf:
        writer = csv.writer(outf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(v) if isinstance(v, float) else v for v in row])


def write_dat(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Whitespace separated columns with a commented header line."""
    with open(path, "w") as outf:
        outf.write("# " + " ".join(header) + "\n")
        for row in rows:
            outf.write(
                " ".join(format_float(v) if isinstance(v, float) else str(v) for v in row)
            )
            outf.write("\n")


def _slug(text: str) -> str:
    return (
        text.replace(":", "_").replace("+", "plus").replace("(", "").replace(")", "")
    )


def _quadrature_label(rule: VolumeRule) -> str:
    return {
        VolumeRule.GLL: "GLL(p+1)",
        VolumeRule.GL: "GL(p+1)",
        VolumeRule.GL_OVER: "GL(p+3)",
    }[rule]


def _yes_no(flag: bool) -> str:
    return "Yes" if flag else "No"


# }}}


# {{{ energy study


@dataclass(frozen=True)
class EnergyRun:
    """Energy and conservation history of a single run."""

    scheme: SchemeSpec
    flux: FluxKind
    p: int
    c: float
    quadrature: str

    t: np.ndarray
    energy: np.ndarray
    conserved: np.ndarray

    diverged: bool = False
    divergence_time: float | None = None

    @property
    def energy_rel(self) -> np.ndarray:
        return self.energy / self.energy[0]

    @property
    def conserved_drift(self) -> np.ndarray:
        return self.conserved - self.conserved[0]

    @property
    def energy_change(self) -> float:
        """Relative change :math:`(E(t_f) - E(0)) / E(0)`."""
        if self.diverged:
            return math.inf
        return float(self.energy_rel[-1] - 1.0)

    @property
    def max_energy_deviation(self) -> float:
        if self.diverged:
            return math.inf
        return float(np.max(np.abs(self.energy_rel - 1.0)))

    @property
    def max_conserved_drift(self) -> float:
        if self.diverged:
            return math.inf
        return float(np.max(np.abs(self.conserved_drift)))

    @property
    def is_conserving(self) -> bool:
        return not self.diverged and abs(self.energy_change) <= ENERGY_CONSERVATION_TOL

    @property
    def is_monotone(self) -> bool:
        return not self.diverged and is_monotone_nonincreasing(
            self.energy, MONOTONE_TOL * self.energy[0]
        )

    def rows(self) -> list[tuple[float, float, float, float]]:
        return [
            (float(t), float(e), float(r), float(d))
            for t, e, r, d in zip(self.t, self.energy, self.energy_rel, self.conserved_drift)
        ]


def simulate(
    disc: Discretization,
    u0: np.ndarray,
    time_loop: TimeLoopConfig,
    *,
    on_record: Callable[[int, float, np.ndarray], bool] | None = None,
) -> tuple[float, np.ndarray]:
    """Advance nodal *u0* to the final time, returning ``(t, u)`` with *u* nodal.

    The stepper advances the orthonormal modal coefficients with
    :meth:`~esfr_split.schemes.Discretization.rhs_modal`. *on_record* gets
    the modal state at every recorded step and may return *True* to stop.
    """
    frame = disc.ops.modal
    t, a = 0.0, frame.to_modal(u0)
    # unstable runs overflow on their way to being flagged as diverged
    with np.errstate(over="ignore", invalid="ignore"):
        for step, t, a in integrate(a, disc.rhs_modal, time_loop):
            if on_record is not None and on_record(step, t, a):
                break
    return t, frame.to_nodal(a)


def run_energy_case(
    cfg: ExperimentConfig, spec: SchemeSpec, flux: FluxKind, p: int
) -> EnergyRun:
    scheme = cfg.scheme_config(spec, p, flux)
    disc = Discretization(
        scheme, cfg.mesh(cfg.n_elements[0]), source=SOURCES[cfg.source]
    )
    u0 = initial_project(INITIAL_CONDITIONS[cfg.initial_condition], disc).u_hat

    ts, es, qs = [], [], []
    diverged_at = None

    def record(step: int, t: float, a: np.ndarray) -> bool:
        nonlocal diverged_at
        e = modal_energy(disc.ops, a)
        ts.append(t)
        es.append(e)
        qs.append(conserved_quantity(disc.field(disc.ops.modal.to_nodal(a), t)))
        if not math.isfinite(e) or e > DIVERGENCE_FACTOR * es[0]:
            diverged_at = t
            return True
        return False

    try:
        simulate(disc, u0, cfg.time_loop, on_record=record)
    except DivergenceError as exc:
        diverged_at = exc.t

    return EnergyRun(
        scheme=spec,
        flux=flux,
        p=p,
        c=scheme.c,
        quadrature=disc.rule.label,
        t=np.array(ts),
        energy=np.array(es),
        conserved=np.array(qs),
        diverged=diverged_at is not None,
        divergence_time=diverged_at,
    )


@dataclass(frozen=True)
class EnergySummaryRow:
    scheme: str
    flux: str
    c: str
    quadrature: str
    conserved: bool
    monotone: bool

    def as_csv(self) -> tuple[str, ...]:
        return (
            self.scheme,
            self.flux,
            self.c,
            self.quadrature,
            _yes_no(self.conserved),
            _yes_no(self.monotone),
        )


@dataclass(frozen=True)
class EnergyStudyResult:
    runs: tuple[EnergyRun, ...]
    summary: tuple[EnergySummaryRow, ...]

    def find(self, scheme: str, flux: str) -> EnergySummaryRow:
        flux_kind = FluxKind.parse(flux)
        spec = SchemeSpec.parse(scheme)
        for row in self.summary:
            if row.scheme == spec.variant.value and row.c == spec.c_label \
                    and row.flux == flux_kind.value:
                return row
        raise KeyError((scheme, flux))


def _applicable(spec: SchemeSpec, rule: VolumeRule) -> bool:
    # the lumped Lobatto scheme only exists on collocated GLL nodes
    return spec.variant is not Variant.LUMPED_LOBATTO or rule is VolumeRule.GLL


def run_energy_study(cfg: ExperimentConfig) -> EnergyStudyResult:
    if cfg.study != "energy":
        raise ConfigError(f"expected an energy study, got {cfg.study!r}")

    runs = []
    summary = []
    for spec in cfg.schemes:
        if not _applicable(spec, cfg.volume_rule):
            logger.info("skipping %s: not applicable on %s", spec.label, cfg.volume_rule.value)
            continue

        for flux in cfg.fluxes:
            group = []
            for p in cfg.degrees:
                run = run_energy_case(cfg, spec, flux, p)
                logger.info(
                    "%s %s p=%d %s: dE/E0 = %.3e, drift = %.3e%s",
                    spec.label, flux.value, p, run.quadrature,
                    run.energy_change, run.max_conserved_drift,
                    f", diverged at t = {run.divergence_time:.4g}" if run.diverged else "",
                )
                group.append(run)

            runs.extend(group)
            # a Yes requires every degree to agree
            summary.append(
                EnergySummaryRow(
                    scheme=spec.variant.value,
                    flux=flux.value,
                    c=spec.c_label,
                    quadrature=_quadrature_label(cfg.volume_rule),
                    conserved=all(r.is_conserving for r in group),
                    monotone=all(r.is_monotone for r in group),
                )
            )

    return EnergyStudyResult(tuple(runs), tuple(summary))


def write_energy_study(result: EnergyStudyResult, cfg: ExperimentConfig, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "summary.csv", SUMMARY_CSV_HEADER, (r.as_csv() for r in result.summary))

    write_csv(
        out / "runs.csv",
        ("scheme", "flux", "c", "p", "quadrature", "energy_change",
         "max_energy_deviation", "max_conserved_drift", "diverged", "divergence_time"),
        (
            (run.scheme.variant.value, run.flux.value, run.c, str(run.p), run.quadrature,
             run.energy_change, run.max_energy_deviation, run.max_conserved_drift,
             _yes_no(run.diverged),
             "" if run.divergence_time is None else run.divergence_time)
            for run in result.runs
        ),
    )

    for run in result.runs:
        stem = f"energy_{_slug(run.scheme.label)}_{run.flux.value}_p{run.p}"
        write_csv(out / f"{stem}.csv", ENERGY_CSV_HEADER, run.rows())
        if cfg.write_dat:
            write_dat(out / f"{stem}.dat", ENERGY_CSV_HEADER, run.rows())


# }}}


# {{{ order of accuracy study


@dataclass(frozen=True)
class ConvergenceTable:
    scheme: SchemeSpec
    flux: FluxKind
    p: int
    c: float
    quadrature: str
    dxs: tuple[float, ...]
    errors: tuple[float, ...]

    @property
    def slopes(self) -> tuple[float, ...]:
        """Observed orders; NaN where either error is at rounding level."""
        errors = [e if e > ROUNDOFF_ERROR else 0.0 for e in self.errors]
        return tuple(ooa_slopes(errors, self.dxs))

    def rows(self) -> list[tuple[float, float, float | str]]:
        slopes = ("",) + self.slopes
        return [(dx, err, s) for dx, err, s in zip(self.dxs, self.errors, slopes)]


def run_ooa_case(
    cfg: ExperimentConfig, spec: SchemeSpec, flux: FluxKind, p: int, n_elements: int
) -> float:
    """L2 error at the final time, NaN if the run diverged."""
    disc = Discretization(
        cfg.scheme_config(spec, p, flux), cfg.mesh(n_elements), source=SOURCES[cfg.source]
    )
    exact = EXACT_SOLUTIONS[cfg.initial_condition, cfg.source]
    u0 = initial_project(INITIAL_CONDITIONS[cfg.initial_condition], disc).u_hat

    # only the final state matters
    time_loop = TimeLoopConfig(cfg.dt, cfg.t_final, record_every=max(cfg.time_loop.n_steps, 1))
    try:
        t, u = simulate(disc, u0, time_loop)
    except DivergenceError:
        return math.nan

    return l2_error(disc.field(u, t), exact, disc.basis.solution_nodes, t)


def run_ooa_study(cfg: ExperimentConfig) -> tuple[ConvergenceTable, ...]:
    if cfg.study != "ooa":
        raise ConfigError(f"expected an ooa study, got {cfg.study!r}")

    tables = []
    for p in cfg.degrees:
        for spec in cfg.schemes:
            if not _applicable(spec, cfg.volume_rule):
                continue
            for flux in cfg.fluxes:
                errors = []
                for m in cfg.n_elements:
                    err = run_ooa_case(cfg, spec, flux, p, m)
                    logger.info("%s %s p=%d M=%d: error %.4e", spec.label, flux.value, p, m, err)
                    errors.append(err)

                scheme = cfg.scheme_config(spec, p, flux)
                tables.append(
                    ConvergenceTable(
                        scheme=spec,
                        flux=flux,
                        p=p,
                        c=scheme.c,
                        quadrature=scheme.volume_rule.rule(p).label,
                        dxs=tuple(cfg.mesh(m).dx for m in cfg.n_elements),
                        errors=tuple(errors),
                    )
                )

    return tuple(tables)


def write_ooa_study(
    tables: Sequence[ConvergenceTable], cfg: ExperimentConfig, out: Path
) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for table in tables:
        stem = f"ooa_{_slug(table.scheme.label)}_{table.flux.value}_p{table.p}"
        write_csv(out / f"{stem}.csv", OOA_CSV_HEADER, table.rows())
        if cfg.write_dat:
            write_dat(out / f"{stem}.dat", OOA_CSV_HEADER, table.rows())


# }}}


# {{{ operator checks


@dataclass(frozen=True)
class OperatorCheck:
    p: int
    quadrature: str
    c: float
    sbp_defect: float
    kd_defect: float
    closed_form_error: float
    filter_residual: float

    def as_csv(self) -> tuple:
        return (
            str(self.p), self.quadrature, self.c, self.sbp_defect,
            self.kd_defect, self.closed_form_error, self.filter_residual,
        )


OPERATOR_CHECK_HEADER = (
    "p", "quadrature", "c", "sbp_defect", "kd_defect", "closed_form_error", "filter_residual"
)


def check_operators(p: int, rule: VolumeRule, c: float, J: float = 1.0) -> OperatorCheck:
    """Operator identity defects for one combination.

    ``closed_form_error`` compares the closed-form inverse against an extended
    precision dense inverse, relative in the Frobenius norm.
    """
    quad = rule.rule(p)
    basis = build_basis(p, quad)
    ops = build_operators(basis, quad, J, c)

    dense = dense_filter_inverse(ops)
    closed = sherman_morrison_filter_inverse(ops)

    return OperatorCheck(
        p=p,
        quadrature=quad.label,
        c=float(c),
        sbp_defect=verify_sbp(ops, basis),
        kd_defect=relative_kd_defect(ops),
        closed_form_error=float(la.norm(closed - dense) / la.norm(dense)),
        filter_residual=filter_inverse_residual(ops),
    )


def run_sbp_check(cfg: ExperimentConfig) -> tuple[OperatorCheck, ...]:
    if cfg.study != "sbp-check":
        raise ConfigError(f"expected an sbp-check study, got {cfg.study!r}")

    J = cfg.mesh(cfg.n_elements[0]).J
    return tuple(
        check_operators(p, rule, c, J)
        for p in cfg.degrees
        for rule in cfg.volume_rules
        for c in cfg.c_values
    )


def write_sbp_check(checks: Sequence[OperatorCheck], out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "sbp_check.csv", OPERATOR_CHECK_HEADER, (c.as_csv() for c in checks))


# }}}
