"""Space-agnostic Fréchet machinery: Fréchet functions, mean sets, and the
Monte Carlo risk harness.

Every replication draws from its own counter-based stream derived from
``(seed, replication)``, so results do not depend on how replications are
scheduled across worker threads.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from .errors import DegenerateRegression, EstimatorError, InvalidInput

UNIQUE_TOL = 1e-6


def rep_rng(seed: int, replication: int) -> np.random.Generator:
    """Philox generator for replication ``replication`` of master ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(replication),))
    return np.random.Generator(np.random.Philox(ss))


def derived_seed(seed: int, *keys: int) -> int:
    """Deterministic child seed, used to decorrelate grid points."""
    return int(np.random.SeedSequence([int(seed), *map(int, keys)]).generate_state(1, np.uint64)[0])


def canonical_key(point) -> tuple:
    if hasattr(point, "canonical_key"):
        return point.canonical_key()
    return tuple(np.atleast_1d(np.asarray(point, dtype=float)).ravel().tolist())


@dataclass(frozen=True)
class MetricSpaceHandle:
    """One of the concrete metric spaces, with its distance and mean solver.

    ``mean`` maps ``(atoms, weights)`` to a :class:`MeanSet` of the empirical
    Fréchet mean for ``rho = distance**2`` (or the space's natural variant).
    """

    kind: str
    distance: Callable[[Any, Any], float]
    mean: Callable[..., "MeanSet"]
    validate: Callable[[Any], None]
    m: int | None = None
    k: int | None = None

    def params(self) -> dict:
        return {key: val for key, val in (("m", self.m), ("k", self.k)) if val is not None}

    def estimator(self) -> Callable:
        """Empirical Fréchet mean with the lexicographic measurable selection."""

        def empirical_mean(sample):
            return self.mean(sample).select()

        empirical_mean.__name__ = f"{self.kind}_frechet_mean"
        return empirical_mean


@dataclass(frozen=True)
class RhoFunction:
    evaluate: Callable[[Any, Any], float]
    honest: bool = True

    @classmethod
    def squared_distance(cls, space: MetricSpaceHandle) -> "RhoFunction":
        return cls(lambda x, y: space.distance(x, y) ** 2, honest=True)


@dataclass(frozen=True)
class EmpiricalMeasure:
    atoms: Sequence
    weights: np.ndarray

    def __post_init__(self):
        if len(self.atoms) == 0:
            raise InvalidInput("empirical measure needs at least one atom")
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (len(self.atoms),):
            raise InvalidInput("one weight per atom required")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise InvalidInput("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, atoms) -> "EmpiricalMeasure":
        n = len(atoms)
        return cls(atoms, np.full(n, 1.0 / n))


@dataclass
class MeanSet:
    """Minimizers of a Fréchet function with their common value.

    ``minimizers`` is normally a list of points; the sphere's extrinsic mean
    uses the :data:`WHOLE_SPACE` sentinel instead when every point minimizes.
    """

    minimizers: Any
    frechet_value: float
    diameter: float
    unique: bool | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.unique is None:
            self.unique = self.diameter < UNIQUE_TOL

    def select(self):
        """Lexicographically smallest canonical representation."""
        if self.minimizers is WHOLE_SPACE or len(self.minimizers) == 0:
            raise InvalidInput("no selectable minimizer in this mean set")
        return min(self.minimizers, key=canonical_key)


class _WholeSpace:
    def __repr__(self):
        return "WholeSpace"


WHOLE_SPACE = _WholeSpace()


def pairwise_diameter(points, distance) -> float:
    diam = 0.0
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            diam = max(diam, float(distance(points[i], points[j])))
    return diam


@dataclass(frozen=True)
class Sampler:
    """Named generative model on a space.

    ``draw(rng, n)`` returns a sample of size ``n`` in the space's native
    array layout.
    """

    name: str
    space: MetricSpaceHandle
    draw: Callable[[np.random.Generator, int], Any]
    params: dict = field(default_factory=dict)

    def sample(self, n: int, seed: int):
        return self.draw(rep_rng(seed, 0), n)


@dataclass(frozen=True)
class RiskReport:
    n: int
    p: float
    estimate: float
    std_error: float
    replications: int


@dataclass(frozen=True)
class ModulationCurve:
    entries: list
    denominator: float
    reports: list = field(default_factory=list)


def frechet_value(space: MetricSpaceHandle, rho: RhoFunction, mu: EmpiricalMeasure, x) -> float:
    space.validate(x)
    for atom in mu.atoms:
        space.validate(atom)
    return float(sum(w * rho.evaluate(x, atom) for atom, w in zip(mu.atoms, mu.weights)))


def run_replications(fn: Callable[[int, np.random.Generator], Any], reps: int, seed: int,
                     threads: int = 1) -> list:
    """Evaluate ``fn(r, rng_r)`` for every replication, in replication order."""

    def one(r):
        return fn(r, rep_rng(seed, r))

    if threads <= 1:
        return [one(r) for r in range(reps)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(one, range(reps)))


def replicate_estimates(estimator, sampler: Sampler, n: int, reps: int, seed: int,
                        threads: int = 1) -> list:
    def one(r, rng):
        sample = sampler.draw(rng, n)
        try:
            return estimator(sample)
        except Exception as exc:  # noqa: BLE001 - re-raised with the replication index
            raise EstimatorError(r, exc) from exc

    return run_replications(one, reps, seed, threads)


def risk(estimator, sampler: Sampler, truth, n: int, p: float, reps: int, seed: int,
         threads: int = 1) -> RiskReport:
    """Monte Carlo estimate of ``E[d(estimator(X_1..X_n), truth)**p]``."""
    if reps < 2 or n < 1 or p < 1:
        raise InvalidInput("risk needs reps >= 2, n >= 1 and p >= 1")
    dist = sampler.space.distance
    estimates = replicate_estimates(estimator, sampler, n, reps, seed, threads)
    losses = np.array([dist(est, truth) for est in estimates], dtype=float) ** p
    return RiskReport(n=n, p=p, estimate=float(losses.mean()),
                      std_error=float(losses.std(ddof=1) / np.sqrt(reps)), replications=reps)


def risk_curve(estimator, sampler: Sampler, truth, n_grid, p: float, reps: int, seed: int,
               threads: int = 1) -> list[RiskReport]:
    return [risk(estimator, sampler, truth, int(n), p, reps, derived_seed(seed, i), threads)
            for i, n in enumerate(n_grid)]


def variance_modulation(space: MetricSpaceHandle, sampler: Sampler, truth, population_var: float,
                        n_grid, reps: int, seed: int, threads: int = 1) -> ModulationCurve:
    """n * E[d^2(empirical mean, truth)] / population variance along ``n_grid``."""
    if population_var <= 0:
        raise InvalidInput("population variance must be positive")
    ns = [int(n) for n in n_grid]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise InvalidInput("n_grid must be strictly increasing")
    reports = risk_curve(space.estimator(), sampler, truth, ns, 2.0, reps, seed, threads)
    entries = [(rep.n, rep.n * rep.estimate / population_var) for rep in reports]
    return ModulationCurve(entries=entries, denominator=float(population_var), reports=reports)


def fit_rate(reports: Sequence[RiskReport]) -> tuple[float, float]:
    """Least-squares slope (and its standard error) of log risk against log n."""
    if len(reports) < 3:
        raise InvalidInput("need at least 3 grid points for a rate fit")
    risks = np.array([r.estimate for r in reports])
    if np.any(risks <= 0):
        raise DegenerateRegression("risk is zero on part of the grid; log-log fit undefined")
    x = np.log([r.n for r in reports])
    y = np.log(risks)
    design = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    dof = len(x) - 2
    sigma2 = resid @ resid / dof if dof > 0 else 0.0
    cov = sigma2 * np.linalg.inv(design.T @ design)
    return float(coef[1]), float(np.sqrt(cov[1, 1]))


def rate_estimate(sampler: Sampler, truth, n_grid, reps: int, seed: int, estimator=None,
                  threads: int = 1) -> tuple[float, float]:
    """Slope of log E[d(empirical mean, truth)] against log n."""
    ns = [int(n) for n in n_grid]
    if len(ns) < 3:
        raise InvalidInput("rate_estimate needs at least 3 grid points")
    if estimator is None:
        estimator = sampler.space.estimator()
    return fit_rate(risk_curve(estimator, sampler, truth, ns, 1.0, reps, seed, threads))
