"""LeCam two-point experiments for non-unique means.

A law ``P`` whose mean set contains ``x`` and ``y`` is perturbed to
``P_{z,t} = (1 - t) P + t delta_z``; the perturbed law has the unique mean
``z``.  For small ``t`` the two perturbations are statistically close, so no
estimator can do well under both.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .core import RiskReport, Sampler, derived_seed, risk, run_replications
from .errors import InvalidInput


def tv_bound(t: float) -> float:
    """Total variation bound 2t between the two perturbed laws."""
    return 2.0 * t


def hellinger_floor(t: float, n: int) -> float:
    """(1 - sqrt(1 - (1 - 2t)^n)) / 2, the two-point testing floor for n draws."""
    if not 0.0 < t <= 0.5 or n < 1:
        raise InvalidInput("need 0 < t <= 1/2 and n >= 1")
    # 1 - (1 - 2t)^n without cancellation for tiny t
    gap = -math.expm1(n * math.log1p(-2.0 * t)) if t < 0.5 else 1.0
    return 0.5 * (1.0 - math.sqrt(gap))


def minimax_floor(diam: float, p: float, eta: float = 0.0) -> float:
    """(1/2) ((diam - eta) / 2)^p."""
    if p < 1:
        raise InvalidInput("p must be at least 1")
    if diam == 0.0:
        return 0.0
    if not 0.0 <= eta < diam:
        raise InvalidInput("need 0 <= eta < diam")
    return 0.5 * ((diam - eta) / 2.0) ** p


@dataclass(frozen=True)
class PerturbedFamily:
    """Perturbations (1 - t) P + t delta_x of ``base`` at registered mean points."""

    base: Sampler
    mean_points: list
    t: float
    diameter: float | None = None

    def __post_init__(self):
        if not 0.0 < self.t <= 1.0:
            raise InvalidInput("t must lie in (0, 1]")
        if len(self.mean_points) == 0:
            raise InvalidInput("register at least one mean point")
        if self.diameter is not None:
            dist = self.base.space.distance
            for i, a in enumerate(self.mean_points):
                for b in self.mean_points[i + 1:]:
                    if dist(a, b) > self.diameter + 1e-12:
                        raise InvalidInput("mean points farther apart than the mean-set diameter")

    def index_of(self, x) -> int:
        dist = self.base.space.distance
        for i, pt in enumerate(self.mean_points):
            if dist(pt, x) <= 1e-12:
                return i
        raise InvalidInput("point is not a registered mean point of the family")

    def with_t(self, t: float) -> "PerturbedFamily":
        return PerturbedFamily(self.base, self.mean_points, t, self.diameter)


def perturbed_sampler(family: PerturbedFamily, x) -> Sampler:
    """Sampler of (1 - t) P + t delta_x; its population mean is exactly {x}."""
    point = family.mean_points[family.index_of(x)]
    t = family.t
    base = family.base

    def draw(rng, n):
        sample = np.array(base.draw(rng, n), dtype=float, copy=True)
        hit = rng.random(n) < t
        sample[hit] = point
        return sample

    return Sampler(f"{base.name}+dirac", base.space, draw, {**base.params, "t": t})


# ----------------------------------------------------------------------------
# Estimator suite


def constant_estimator(point, name: str = "constant") -> Callable:
    def estimate(_sample):
        return point

    estimate.__name__ = name
    return estimate


def shrunk_estimator(space, toward, lam: float = 0.5, mean_estimator=None) -> Callable:
    """Geodesic point a fraction ``lam`` of the way from ``toward`` to the mean."""
    mean_estimator = mean_estimator or space.estimator()
    if space.kind == "circle":
        from .circle import wrap

        def estimate(sample):
            mu = mean_estimator(sample)
            return wrap(toward + lam * wrap(mu - toward))
    elif space.kind == "sphere":
        from .sphere import exp_map, log_map

        def estimate(sample):
            mu = mean_estimator(sample)
            return exp_map(toward, lam * log_map(toward, mu))
    else:
        raise InvalidInput(f"no geodesic shrinkage for space {space.kind!r}")
    estimate.__name__ = "shrunk"
    return estimate


def estimator_suite(space, x, y, lam: float = 0.5) -> dict[str, Callable]:
    """Fréchet mean, the two constant guesses, and a mean shrunk toward ``x``."""
    return {
        "frechet_mean": space.estimator(),
        "constant_x": constant_estimator(x, "constant_x"),
        "constant_y": constant_estimator(y, "constant_y"),
        "shrunk_to_x": shrunk_estimator(space, x, lam),
    }


# ----------------------------------------------------------------------------
# Experiments


@dataclass(frozen=True)
class FloorReport:
    diam: float
    p: float
    asymptotic_floor: float
    finite_n_floor: float
    t: float
    n: int


@dataclass(frozen=True)
class EstimatorRisk:
    name: str
    risk_x: RiskReport
    risk_y: RiskReport

    @property
    def worst(self) -> RiskReport:
        return self.risk_x if self.risk_x.estimate >= self.risk_y.estimate else self.risk_y

    @property
    def sup_risk(self) -> float:
        return self.worst.estimate


@dataclass
class LeCamReport:
    floors: FloorReport
    estimators: list
    flags: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "floors": asdict(self.floors),
            "estimators": [
                {"name": e.name, "risk_x": asdict(e.risk_x), "risk_y": asdict(e.risk_y),
                 "sup_risk": e.sup_risk, "sup_stderr": e.worst.std_error}
                for e in self.estimators
            ],
            "flags": self.flags,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def floor_report(distance_xy: float, p: float, t: float, n: int, eta: float = 0.0) -> FloorReport:
    asym = minimax_floor(distance_xy, p, eta)
    finite = ((distance_xy - eta) / 2.0) ** p * hellinger_floor(min(t, 0.5), n)
    return FloorReport(distance_xy, p, asym, finite, t, n)


def lecam_experiment(family: PerturbedFamily, x, y, estimator_suite, n: int, p: float,
                     reps: int, seed: int, eta: float = 0.0, threads: int = 1) -> LeCamReport:
    """Risk of each estimator under P_{x,t} (truth x) and P_{y,t} (truth y).

    All estimators see the same replications (common random numbers).
    ``floor_not_binding`` flags estimators whose sup-risk lies below the
    asymptotic floor, which can happen for large ``t``.
    """
    if not 0.0 < family.t < 1.0:
        raise InvalidInput("t must lie in (0, 1) for a two-point experiment")
    family.index_of(x)
    family.index_of(y)
    suite = dict(estimator_suite)
    dist = family.base.space.distance
    floors = floor_report(float(dist(x, y)), p, family.t, n, eta)
    seed_x, seed_y = derived_seed(seed, 0), derived_seed(seed, 1)
    samp_x, samp_y = perturbed_sampler(family, x), perturbed_sampler(family, y)
    rows = []
    for name, est in suite.items():
        rx = risk(est, samp_x, x, n, p, reps, seed_x, threads)
        ry = risk(est, samp_y, y, n, p, reps, seed_y, threads)
        rows.append(EstimatorRisk(name, rx, ry))
    below = [e.name for e in rows if e.sup_risk < floors.asymptotic_floor]
    violated = [e.name for e in rows
                if e.sup_risk + 3.0 * e.worst.std_error < floors.finite_n_floor * (1.0 - 1e-6)]
    flags = {"floor_not_binding": bool(below), "below_asymptotic_floor": below,
             "finite_floor_violations": violated}
    return LeCamReport(floors, rows, flags)


def coin_flip_test(x, y) -> Callable:
    def test(_sample, rng):
        return x if rng.random() < 0.5 else y

    return test


def plugin_test(space, x, y, mean_estimator=None) -> Callable:
    """Decide for whichever of x, y is closer to the empirical mean."""
    mean_estimator = mean_estimator or space.estimator()

    def test(sample, _rng):
        mu = mean_estimator(sample)
        return x if space.distance(mu, x) <= space.distance(mu, y) else y

    return test


@dataclass(frozen=True)
class TestErrors:
    error_x: float
    error_y: float
    floor: float

    @property
    def max_error(self) -> float:
        return max(self.error_x, self.error_y)


def test_errors(test, family: PerturbedFamily, x, y, n: int, reps: int, seed: int,
                threads: int = 1) -> TestErrors:
    """Misclassification rates of ``test(sample, rng)`` under P_{x,t} and P_{y,t}."""
    dist = family.base.space.distance
    rates = []
    for zi, (z, other) in enumerate(((x, y), (y, x))):
        sampler = perturbed_sampler(family, z)

        def one(r, rng, sampler=sampler, z=z, other=other):
            decision = test(sampler.draw(rng, n), rng)
            return dist(decision, z) > dist(decision, other)

        wrong = run_replications(one, reps, derived_seed(seed, zi), threads)
        rates.append(float(np.mean(wrong)))
    return TestErrors(rates[0], rates[1], hellinger_floor(min(family.t, 0.5), n))


def test_error_floor(test, family: PerturbedFamily, x, y, t: float, n: int, reps: int,
                     seed: int, threads: int = 1) -> float:
    """Empirical max over z in {x, y} of the probability that ``test`` misses z."""
    return test_errors(test, family.with_t(t), x, y, n, reps, seed, threads).max_error


test_error_floor.__test__ = False  # not a pytest test
test_errors.__test__ = False
TestErrors.__test__ = False

