"""Experiment configuration, the ascending-p sweep and result files."""
from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import energy, infinity
from .eigensolver import EigenPair, SolverError, SolverOptions, init_cone, minimize_rayleigh
from .energy import FracParams
from .geometry import GridDomain, build_box, build_disk, build_interval

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "p", "alpha", "beta", "lambda", "lambda_root", "lambda_inf", "abs_err",
    "iterations", "kkt_u", "kkt_v", "converged", "wall_time_s",
)


class ConfigError(ValueError):
    pass


@dataclass
class DomainSpec:
    kind: str = "interval"
    a: float = 0.0
    b: float = 1.0
    center: tuple = (0.0, 0.0)
    radius: float = 1.0
    lower: tuple = (0.0, 0.0)
    upper: tuple = (1.0, 1.0)


@dataclass
class GridSpec:
    n: int | None = 161
    h: float | None = None
    collar_width: float | None = None


@dataclass
class FractionalSpec:
    r: float = 0.5
    s: float = 0.5
    gamma: float = 0.5


@dataclass
class OutputSpec:
    directory: str = "out"
    formats: tuple = ("csv", "fields", "json")


@dataclass
class ExperimentConfig:
    domain: DomainSpec = field(default_factory=DomainSpec)
    grid: GridSpec = field(default_factory=GridSpec)
    fractional: FractionalSpec = field(default_factory=FractionalSpec)
    sweep: tuple = (4.0, 8.0, 16.0, 32.0, 64.0)
    solver: SolverOptions = field(default_factory=SolverOptions)
    output: OutputSpec = field(default_factory=OutputSpec)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        def build(kind, key):
            sub = raw.get(key, {})
            if not isinstance(sub, dict):
                raise ConfigError(f"'{key}' must be an object")
            names = {f.name for f in dataclasses.fields(kind)}
            unknown = set(sub) - names
            if unknown:
                raise ConfigError(f"unknown field(s) in '{key}': {sorted(unknown)}")
            try:
                return kind(**sub)
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad '{key}' section: {exc}") from exc

        unknown = set(raw) - {"domain", "grid", "fractional", "sweep", "solver", "output"}
        if unknown:
            raise ConfigError(f"unknown top-level field(s): {sorted(unknown)}")
        sweep = raw.get("sweep", {"p": list(cls.sweep)})
        if not isinstance(sweep, dict) or "p" not in sweep:
            raise ConfigError("'sweep' must be an object with a 'p' list")
        try:
            ps = tuple(float(p) for p in sweep["p"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad sweep p values: {exc}") from exc
        cfg = cls(
            domain=build(DomainSpec, "domain"),
            grid=build(GridSpec, "grid"),
            fractional=build(FractionalSpec, "fractional"),
            sweep=ps,
            solver=build(SolverOptions, "solver"),
            output=build(OutputSpec, "output"),
        )
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        out = dataclasses.asdict(self)
        out["sweep"] = {"p": list(self.sweep)}
        return out

    @property
    def dim(self) -> int:
        return 1 if self.domain.kind == "interval" else 2

    def params(self, p: float) -> FracParams:
        f = self.fractional
        return FracParams(f.r, f.s, p, f.gamma)

    def validate(self) -> None:
        if self.domain.kind not in ("interval", "disk", "box"):
            raise ConfigError(f"unknown domain kind {self.domain.kind!r}")
        if not self.sweep:
            raise ConfigError("sweep needs at least one p value")
        if any(b <= a for a, b in zip(self.sweep, self.sweep[1:])):
            raise ConfigError(f"sweep p values must be strictly increasing, got {list(self.sweep)}")
        for p in self.sweep:
            try:
                self.params(p).validate(dim=self.dim)
            except ValueError as exc:
                raise ConfigError(f"p={p:g}: {exc}") from exc
        try:
            self.build_domain()
        except ValueError as exc:
            raise ConfigError(f"bad domain/grid: {exc}") from exc

    def build_domain(self) -> GridDomain:
        d, g = self.domain, self.grid
        if d.kind == "interval":
            if g.n is None:
                if g.h is None:
                    raise ValueError("interval grid needs n or h")
                return build_interval(d.a, d.b, int(round((d.b - d.a) / g.h)))
            return build_interval(d.a, d.b, int(g.n))
        if g.h is None:
            raise ValueError(f"{d.kind} grid needs h")
        if d.kind == "disk":
            width = g.collar_width if g.collar_width is not None else 2 * d.radius
            return build_disk(d.center, d.radius, g.h, width)
        lo, hi = np.asarray(d.lower, float), np.asarray(d.upper, float)
        width = g.collar_width if g.collar_width is not None else float(np.hypot(*(hi - lo)))
        return build_box(lo, hi, g.h, width)


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    return ExperimentConfig.from_dict(raw)


@dataclass
class SweepRecord:
    p: float
    alpha: float
    beta: float
    lam: float
    lambda_root: float
    lambda_inf: float
    abs_err: float
    iterations: int
    kkt_u: float
    kkt_v: float
    converged: bool
    wall_time_s: float

    def row(self) -> list:
        return [
            self.p, self.alpha, self.beta, self.lam, self.lambda_root, self.lambda_inf, self.abs_err,
            self.iterations, self.kkt_u, self.kkt_v, int(self.converged), self.wall_time_s,
        ]


@dataclass
class SweepResult:
    config: ExperimentConfig
    domain: GridDomain
    records: list
    pairs: list
    successive_distance: list
    residual_u: float
    residual_v: float

    @property
    def final(self) -> EigenPair:
        return self.pairs[-1]


def run_sweep(config: ExperimentConfig) -> SweepResult:
    """Solve at each p in ascending order, warm-starting from the previous eigenpair.

    The first solve starts from the extremal cone pair.  Non-converged solves are
    flagged in their record and the sweep continues.
    """
    config.validate()
    domain = config.build_domain()
    f = config.fractional
    lam_inf = infinity.lambda_infinity_geometric(domain, f.gamma, f.r, f.s)
    init = init_cone(domain, config.params(config.sweep[0]))
    records, pairs = [], []
    for p in config.sweep:
        params = config.params(p)
        t0 = time.perf_counter()
        try:
            pair = minimize_rayleigh(domain, params, init, config.solver)
        except SolverError as exc:
            log.warning("p=%g: solver failed: %s", p, exc)
            lam = energy.rayleigh(domain, init[0], init[1], params)
            pair = EigenPair(domain, params, np.asarray(init[0]), np.asarray(init[1]), lam,
                             math.nan, math.nan, 0, False)
        elapsed = time.perf_counter() - t0
        root = math.exp(math.log(pair.lam) / p)
        records.append(SweepRecord(
            p=p, alpha=params.alpha, beta=params.beta, lam=pair.lam, lambda_root=root,
            lambda_inf=lam_inf, abs_err=abs(root - lam_inf), iterations=pair.iterations,
            kkt_u=pair.kkt_u, kkt_v=pair.kkt_v, converged=pair.converged, wall_time_s=elapsed,
        ))
        if not pair.converged:
            log.warning("p=%g did not converge (kkt %.3g, %.3g)", p, pair.kkt_u, pair.kkt_v)
        pairs.append(pair)
        init = (pair.u, pair.v)

    dist = [
        float(max(np.abs(a.u - b.u).max(), np.abs(a.v - b.v).max()))
        for a, b in zip(pairs, pairs[1:])
    ]
    last = pairs[-1]
    res_u, res_v = infinity.limit_residual(domain, last.u, last.v, f.gamma, f.r, f.s, lam_inf)
    return SweepResult(config, domain, records, pairs, dist, res_u, res_v)


def _p_label(p: float) -> str:
    return f"{p:g}"


def write_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in sorted(records, key=lambda r: r.p):
            writer.writerow([repr(float(x)) if isinstance(x, float) else x for x in rec.row()])


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_fields(pair: EigenPair, directory) -> tuple[Path, Path]:
    """Two-column (node index, value) text files for u and v."""
    directory = Path(directory)
    label = _p_label(pair.params.p)
    paths = []
    for name, values in (("u", pair.u), ("v", pair.v)):
        path = directory / f"eigen_p{label}_{name}.txt"
        with open(path, "w") as fh:
            for k, val in enumerate(values):
                fh.write(f"{k} {float(val)!r}\n")
        paths.append(path)
    return paths[0], paths[1]


def read_field(path) -> np.ndarray:
    data = np.loadtxt(path, ndmin=2)
    return data[:, 1]


def write_limit_json(path, *, lambda_inf_geometric, lambda_inf_variational, inradius, gamma, r, s,
                     residual_u, residual_v, **extra) -> dict:
    payload = dict(
        lambda_inf_geometric=lambda_inf_geometric,
        lambda_inf_variational=lambda_inf_variational,
        inradius=inradius,
        gamma=gamma,
        r=r,
        s=s,
        residual_u=residual_u,
        residual_v=residual_v,
        **extra,
    )
    Path(path).write_text(json.dumps(payload, indent=2, default=float) + "\n")
    return payload


def write_sweep_outputs(result: SweepResult, directory) -> None:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    formats = set(result.config.output.formats)
    if "csv" in formats:
        write_csv(result.records, directory / "sweep.csv")
    if "fields" in formats:
        for pair in result.pairs:
            write_fields(pair, directory)
    if "json" in formats:
        f = result.config.fractional
        last = result.final
        write_limit_json(
            directory / "limit.json",
            lambda_inf_geometric=result.records[-1].lambda_inf,
            lambda_inf_variational=infinity.lambda_infinity_variational(
                result.domain, last.u, last.v, f.gamma, f.r, f.s),
            inradius=result.domain.inradius,
            gamma=f.gamma, r=f.r, s=f.s,
            residual_u=result.residual_u, residual_v=result.residual_v,
            source=f"eigenpair at p={_p_label(last.params.p)}",
            successive_distance=result.successive_distance,
        )
