"""Command-line experiment runner.

Every tabular result is a CSV whose first line is ``# config: <json>``,
followed by a header starting ``n,risk,stderr``.  With ``--output PATH`` the
CSV goes to PATH and run metadata to PATH with a ``.json`` suffix; without it
the CSV is printed and metadata goes to stderr.  Exit status is 0 on success,
2 for invalid input and 3 when a solver fails.
"""
from __future__ import annotations

import argparse
import io as _io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import core, io, lowerbound, sphere, wasserstein
from .core import WHOLE_SPACE
from .errors import (AntipodalPoint, Empty, FrechetLabError, InvalidDensity, InvalidInput,
                     OutOfDomain, OutOfRegime, TooLarge)
from .spaces import make_sampler, make_space

COMMANDS = ("mean", "simulate", "rate", "modulation", "lecam", "barycenter", "region")
SIMULATION_COMMANDS = ("simulate", "rate", "modulation", "lecam")
VALIDATION_ERRORS = (InvalidInput, TooLarge, OutOfRegime, OutOfDomain, InvalidDensity,
                     AntipodalPoint)
REAL = "%.17g"
SAMPLER_SPACES = {"circle": "circle", "sphere": "sphere", "shapes": "preshape"}


@dataclass
class ExperimentConfig:
    command: str
    space: dict = field(default_factory=lambda: {"kind": "circle"})
    sampler: dict = field(default_factory=dict)
    estimator: str = "frechet"
    n_grid: list = field(default_factory=list)
    reps: int = 100
    p: float = 2.0
    seed: int = 0
    output_path: str | None = None
    params: dict = field(default_factory=dict)

    def validate(self) -> "ExperimentConfig":
        if self.command not in COMMANDS:
            raise InvalidInput(f"unknown command {self.command!r}")
        if self.command in SIMULATION_COMMANDS:
            if not self.n_grid:
                raise InvalidInput("--n-grid must be nonempty for simulation commands")
            if any(int(n) < 1 for n in self.n_grid):
                raise InvalidInput("sample sizes must be positive")
            if self.reps < 2:
                raise InvalidInput("--reps must be at least 2")
        if self.command in ("simulate", "rate", "modulation") and not self.sampler.get("name"):
            raise InvalidInput("--sampler is required")
        if self.command == "rate" and len(self.n_grid) < 3:
            raise InvalidInput("rate needs at least 3 grid points")
        if self.command == "modulation" and any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise InvalidInput("n grid must be strictly increasing")
        if self.command in ("mean", "barycenter") and not self.params.get("input"):
            raise InvalidInput("--input is required")
        if self.command == "region" and "gamma" not in self.params:
            raise InvalidInput("--gamma is required")
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise InvalidInput(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "command" not in data:
            raise InvalidInput("config lacks 'command'")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidInput(f"line {exc.lineno}: {exc.msg}") from exc
        return cls.from_dict(data)


# ----------------------------------------------------------------------------
# Argument parsing


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(tok)) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}") from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of reals: {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frechet-lab",
                                     description="Fréchet mean experiments on non-Euclidean data.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="JSON config file; flags override its entries")
    parser.add_argument("--space", choices=("circle", "sphere", "preshape", "wasserstein"))
    parser.add_argument("--m", type=int, help="sphere dimension or landmark dimension")
    parser.add_argument("--k", type=int, help="number of landmarks")
    parser.add_argument("--sampler", help="sampler name, e.g. circle.pow")
    parser.add_argument("--estimator", help="frechet, intrinsic, intrinsic_gd or extrinsic")
    parser.add_argument("--n-grid", type=_int_list)
    parser.add_argument("--reps", type=int)
    parser.add_argument("--p", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--t", type=_float_list, help="perturbation weight(s)")
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--r", type=float)
    parser.add_argument("--weight", type=float, help="uniform weight of circle.mixture")
    parser.add_argument("--gamma", type=float)
    parser.add_argument("--input", help="data file for mean and barycenter")
    parser.add_argument("--raw", action="store_true",
                        help="landmark input holds raw coordinates to centre and scale")
    parser.add_argument("--threads", type=int,
                        help="worker threads (default: $FRECHET_LAB_THREADS or 1)")
    parser.add_argument("--output", help="CSV path; metadata goes next to it as .json")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    base: dict = {}
    if args.config:
        path = Path(args.config)
        try:
            text = path.read_text()
        except OSError as exc:
            raise InvalidInput(f"{path}: cannot read ({exc.strerror})") from exc
        try:
            base = ExperimentConfig.from_json(text).to_dict()
        except InvalidInput as exc:
            raise InvalidInput(f"{path}: {exc}") from exc
    cfg = ExperimentConfig(**{**base, "command": args.command})
    space = dict(cfg.space)
    if args.space:
        space = {"kind": args.space}
    for key in ("m", "k"):
        if getattr(args, key) is not None:
            space[key] = getattr(args, key)
    cfg.space = space
    sampler = dict(cfg.sampler)
    if args.sampler:
        sampler = {"name": args.sampler, "params": {}}
    params = dict(sampler.get("params", {}))
    for key in ("alpha", "r", "weight"):
        if getattr(args, key) is not None:
            params[key] = getattr(args, key)
    if args.m is not None and sampler.get("name", "").startswith("sphere."):
        params["m"] = args.m
    if sampler:
        sampler["params"] = params
        if not args.space:
            kind = SAMPLER_SPACES.get(sampler["name"].split(".")[0], space.get("kind"))
            space = {"kind": kind, **({"m": params["m"]} if "m" in params else {})}
            cfg.space = space
    cfg.sampler = sampler
    for key, attr in (("estimator", "estimator"), ("n_grid", "n_grid"), ("reps", "reps"),
                      ("p", "p"), ("seed", "seed"), ("output_path", "output")):
        if getattr(args, attr) is not None:
            setattr(cfg, key, getattr(args, attr))
    if cfg.command == "rate":
        cfg.p = 1.0  # rates are fitted to E[d]
    extra = dict(cfg.params)
    if args.t is not None:
        extra["t"] = args.t
    if args.gamma is not None:
        extra["gamma"] = args.gamma
    if args.input is not None:
        extra["input"] = args.input
    if args.raw:
        extra["raw"] = True
    cfg.params = extra
    return cfg.validate()


def resolve_threads(flag: int | None) -> int:
    if flag is not None:
        threads = flag
    else:
        env = os.environ.get("FRECHET_LAB_THREADS", "1")
        try:
            threads = int(env)
        except ValueError as exc:
            raise InvalidInput(f"FRECHET_LAB_THREADS must be an integer, got {env!r}") from exc
    if threads < 1:
        raise InvalidInput("thread count must be at least 1")
    return threads


# ----------------------------------------------------------------------------
# Output


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return REAL % value
    return str(value)


def render_csv(cfg: ExperimentConfig, header: list[str], rows: list[list]) -> str:
    buf = _io.StringIO()
    buf.write(f"# config: {cfg.to_json()}\n")
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def _to_jsonable(obj):
    if obj is WHOLE_SPACE:
        return "whole_space"
    if isinstance(obj, wasserstein.DiscreteMeasure):
        return obj.to_dict()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, (list, tuple)):
        return [_to_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _to_jsonable(v) for k, v in obj.items()}
    return obj


def mean_set_dict(ms: core.MeanSet) -> dict:
    info = {k: v for k, v in ms.info.items() if k in ("iterations", "converged", "eigengap", "lp_value")}
    return {"minimizers": _to_jsonable(ms.minimizers), "frechet_value": ms.frechet_value,
            "diameter": ms.diameter, "unique": bool(ms.unique), "info": _to_jsonable(info)}


@dataclass
class RunResult:
    csv: str | None
    meta: dict


def emit(cfg: ExperimentConfig, result: RunResult, stdout, stderr) -> None:
    meta = {"config": cfg.to_dict(), **_to_jsonable(result.meta)}
    meta_text = json.dumps(meta, indent=2, sort_keys=True)
    if cfg.output_path:
        out = Path(cfg.output_path)
        if result.csv is not None:
            out.write_text(result.csv)
            out.with_suffix(".json").write_text(meta_text + "\n")
        else:
            out.write_text(meta_text + "\n")
        return
    if result.csv is not None:
        stdout.write(result.csv)
        stderr.write(meta_text + "\n")
    else:
        stdout.write(meta_text + "\n")


# ----------------------------------------------------------------------------
# Commands


def _estimator_for(cfg: ExperimentConfig, space):
    name = cfg.estimator
    if name == "frechet":
        return space.estimator()
    if space.kind == "sphere":
        solvers = {"intrinsic": sphere.intrinsic_mean, "intrinsic_gd": sphere.intrinsic_mean_gd,
                   "extrinsic": sphere.extrinsic_mean}
        if name in solvers:
            solver = solvers[name]
            return lambda sample: solver(sample).select()
    raise InvalidInput(f"unknown estimator {name!r} for space {space.kind!r}")


def _sampler_spec(cfg):
    return make_sampler(cfg.sampler["name"], cfg.sampler.get("params", {}))


def cmd_mean(cfg: ExperimentConfig, threads: int) -> RunResult:
    kind = cfg.space.get("kind", "circle")
    path = cfg.params["input"]
    if kind == "circle":
        data = io.read_circle_csv(path)
        ms = make_space("circle").mean(data)
    elif kind == "sphere":
        data = io.read_sphere_csv(path)
        solvers = {"frechet": sphere.intrinsic_mean, "intrinsic": sphere.intrinsic_mean,
                   "intrinsic_gd": sphere.intrinsic_mean_gd, "extrinsic": sphere.extrinsic_mean}
        if cfg.estimator not in solvers:
            raise InvalidInput(f"unknown estimator {cfg.estimator!r} for the sphere")
        ms = solvers[cfg.estimator](data)
    elif kind == "preshape":
        data = io.read_landmark_csv(path, m=int(cfg.space.get("m", 2)),
                                    preprocess=bool(cfg.params.get("raw", False)))
        ms = make_space("preshape", data.shape[1], data.shape[2] + 1).mean(data)
    elif kind == "wasserstein":
        measures, weights = io.read_measures_json(path)
        ms = wasserstein.barycenter_multimarginal(measures, weights)
    else:
        raise InvalidInput(f"unknown space {kind!r}")
    return RunResult(None, {"mean": mean_set_dict(ms)})


def cmd_barycenter(cfg: ExperimentConfig, threads: int) -> RunResult:
    measures, weights = io.read_measures_json(cfg.params["input"])
    ms = wasserstein.barycenter_multimarginal(measures, weights)
    return RunResult(None, {"mean": mean_set_dict(ms)})


def cmd_region(cfg: ExperimentConfig, threads: int) -> RunResult:
    gamma = float(cfg.params["gamma"])
    try:
        region = wasserstein.feasible_region(gamma)
    except Empty:
        return RunResult(None, {"gamma": gamma, "empty": True})
    return RunResult(None, {"gamma": gamma, "empty": False,
                            "beta_lo": region.beta_lo, "beta_hi": region.beta_hi})


def _curve(cfg, threads, p):
    spec = _sampler_spec(cfg)
    if spec.truth is None:
        raise InvalidInput(f"sampler {cfg.sampler['name']!r} has no unique population mean")
    est = _estimator_for(cfg, spec.sampler.space)
    reports = core.risk_curve(est, spec.sampler, spec.truth, cfg.n_grid, p, cfg.reps, cfg.seed, threads)
    return spec, reports


def cmd_simulate(cfg: ExperimentConfig, threads: int) -> RunResult:
    _, reports = _curve(cfg, threads, cfg.p)
    rows = [[r.n, r.estimate, r.std_error, r.replications] for r in reports]
    return RunResult(render_csv(cfg, ["n", "risk", "stderr", "reps"], rows), {})


def cmd_rate(cfg: ExperimentConfig, threads: int) -> RunResult:
    _, reports = _curve(cfg, threads, 1.0)
    slope, slope_se = core.fit_rate(reports)
    rows = [[r.n, r.estimate, r.std_error] for r in reports]
    return RunResult(render_csv(cfg, ["n", "risk", "stderr"], rows),
                     {"slope": slope, "slope_stderr": slope_se})


def cmd_modulation(cfg: ExperimentConfig, threads: int) -> RunResult:
    spec = _sampler_spec(cfg)
    if spec.truth is None:
        raise InvalidInput(f"sampler {cfg.sampler['name']!r} has no unique population mean")
    var = spec.population_var()
    curve = core.variance_modulation(spec.sampler.space, spec.sampler, spec.truth, var,
                                     cfg.n_grid, cfg.reps, cfg.seed, threads)
    rows = [[r.n, r.estimate, r.std_error, m_n] for r, (_, m_n) in zip(curve.reports, curve.entries)]
    return RunResult(render_csv(cfg, ["n", "risk", "stderr", "m_n"], rows),
                     {"denominator": curve.denominator})


def cmd_lecam(cfg: ExperimentConfig, threads: int) -> RunResult:
    if cfg.space.get("kind", "circle") != "circle":
        raise InvalidInput("lecam is available on the circle")
    ts = cfg.params.get("t", [1e-3])
    space = make_space("circle")
    base = make_sampler("circle.uniform").sampler
    x, y = 0.0, -math.pi
    suite = lowerbound.estimator_suite(space, x, y)
    rows, reports = [], []
    for ti, t in enumerate(ts):
        family = lowerbound.PerturbedFamily(base, [x, y], float(t), diameter=math.pi)
        for ni, n in enumerate(cfg.n_grid):
            rep = lowerbound.lecam_experiment(family, x, y, suite, int(n), cfg.p, cfg.reps,
                                              core.derived_seed(cfg.seed, ti, ni), threads=threads)
            reports.append(rep.to_dict())
            for e in rep.estimators:
                holds = e.sup_risk + 3.0 * e.worst.std_error >= rep.floors.finite_n_floor * (1 - 1e-6)
                rows.append([int(n), e.sup_risk, e.worst.std_error, float(t), e.name,
                             rep.floors.finite_n_floor, rep.floors.asymptotic_floor, int(holds)])
    header = ["n", "risk", "stderr", "t", "estimator", "finite_floor", "asymptotic_floor", "holds"]
    return RunResult(render_csv(cfg, header, rows), {"reports": reports})


HANDLERS = {"mean": cmd_mean, "simulate": cmd_simulate, "rate": cmd_rate,
            "modulation": cmd_modulation, "lecam": cmd_lecam, "barycenter": cmd_barycenter,
            "region": cmd_region}


def run(cfg: ExperimentConfig, threads: int = 1, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        cfg.validate()
        result = HANDLERS[cfg.command](cfg, threads)
        emit(cfg, result, stdout, stderr)
    except VALIDATION_ERRORS as exc:
        stderr.write(f"frechet-lab: error: {exc}\n")
        return 2
    except FrechetLabError as exc:
        stderr.write(f"frechet-lab: solver error: {exc}\n")
        return 3
    except OSError as exc:
        stderr.write(f"frechet-lab: error: {exc.filename}: {exc.strerror}\n")
        return 2
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        threads = resolve_threads(args.threads)
    except InvalidInput as exc:
        sys.stderr.write(f"frechet-lab: error: {exc}\n")
        return 2
    return run(cfg, threads)


if __name__ == "__main__":
    sys.exit(main())
