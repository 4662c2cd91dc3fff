"""Concrete metric-space handles and the named sampler registry."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import circle, shapes, sphere, wasserstein
from .core import MetricSpaceHandle, Sampler
from .errors import InvalidInput


def _validate_circle(x) -> None:
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("angles must be finite")


def _validate_sphere(m):
    def validate(x):
        arr = np.asarray(x, dtype=float)
        if arr.shape[-1] != m + 1:
            raise InvalidInput(f"sphere points need {m + 1} coordinates")
        sphere.as_points(arr)
    return validate


def _validate_preshape(m, k):
    def validate(x):
        arr = np.asarray(x, dtype=float)
        if arr.shape[-2:] != (m, k - 1):
            raise InvalidInput(f"pre-shapes need shape ({m}, {k - 1})")
        shapes.as_configs(arr)
    return validate


def _validate_measure(x) -> None:
    if not isinstance(x, wasserstein.DiscreteMeasure):
        raise InvalidInput("Wasserstein points are DiscreteMeasure instances")


def circle_space() -> MetricSpaceHandle:
    return MetricSpaceHandle("circle", circle.arc_distance,
                             lambda atoms, weights=None: circle.intrinsic_mean_exact(atoms, weights),
                             _validate_circle)


def sphere_space(m: int = 2, mean: str = "intrinsic") -> MetricSpaceHandle:
    """S^m with the geodesic distance; ``mean`` picks intrinsic or extrinsic."""
    solvers = {"intrinsic": sphere.intrinsic_mean, "extrinsic": sphere.extrinsic_mean}
    if mean not in solvers:
        raise InvalidInput(f"unknown sphere mean {mean!r}")
    solver = solvers[mean]
    return MetricSpaceHandle("sphere", sphere.geodesic_distance,
                             lambda atoms, weights=None: solver(atoms, weights=weights),
                             _validate_sphere(m), m=m)


def preshape_space(m: int = 2, k: int = 3) -> MetricSpaceHandle:
    return MetricSpaceHandle("preshape", lambda x, y: shapes.procrustes_distance(x, y)[0],
                             lambda atoms, weights=None: shapes.procrustes_mean(atoms, weights=weights),
                             _validate_preshape(m, k), m=m, k=k)


def wasserstein_space(m: int = 2) -> MetricSpaceHandle:
    return MetricSpaceHandle("wasserstein", lambda a, b: wasserstein.w2_distance(a, b)[0],
                             lambda atoms, weights=None: wasserstein.barycenter_multimarginal(atoms, weights),
                             _validate_measure, m=m)


def make_space(kind: str, m: int | None = None, k: int | None = None) -> MetricSpaceHandle:
    if kind == "circle":
        return circle_space()
    if kind == "sphere":
        return sphere_space(m or 2)
    if kind == "preshape":
        return preshape_space(m or 2, k or 3)
    if kind == "wasserstein":
        return wasserstein_space(m or 2)
    raise InvalidInput(f"unknown space {kind!r}")


# ----------------------------------------------------------------------------
# Samplers


@dataclass(frozen=True)
class SamplerSpec:
    """A named generative model: its sampler, population mean and variance."""

    sampler: Sampler
    truth: object
    population_var: Callable[[], float]


def _circle_density_spec(name, density, params) -> SamplerSpec:
    space = circle_space()
    sampler = Sampler(name, space, lambda rng, n: density.sample(n, rng), params)
    return SamplerSpec(sampler, 0.0, density.second_moment)


def _circle_uniform(params):
    space = circle_space()
    sampler = Sampler("circle.uniform", space, lambda rng, n: rng.uniform(-math.pi, math.pi, n), params)
    return SamplerSpec(sampler, None, lambda: math.pi ** 2 / 3.0)


def _circle_normal(params):
    scale = float(params.get("scale", 0.01))
    space = circle_space()
    sampler = Sampler("circle.normal", space,
                      lambda rng, n: circle.wrap(scale * rng.standard_normal(n)), params)
    return SamplerSpec(sampler, 0.0, lambda: scale ** 2)


def _monte_carlo_var(spec_sampler, truth, size=200_000, seed=20240601):
    def var():
        sample = spec_sampler.sample(size, seed)
        d = spec_sampler.space.distance(sample, truth)
        return float(np.mean(np.asarray(d) ** 2))
    return var


def _halfsphere(params):
    alpha = float(params["alpha"])
    m = int(params.get("m", 2))
    space = sphere_space(m)
    sampler = Sampler("sphere.halfsphere", space,
                      lambda rng, n: sphere.sample_halfsphere_mixture(alpha, m, n, rng), params)
    north = sphere.basis_vector(m + 1)
    return SamplerSpec(sampler, north, _monte_carlo_var(sampler, north))


def _flip(params):
    flip = float(params.get("flip", 1.0 / 6.0))
    spread = float(params.get("spread", 0.3))
    m = int(params.get("m", 2))
    space = sphere_space(m, mean="extrinsic")
    sampler = Sampler("sphere.flip", space,
                      lambda rng, n: sphere.sample_antipodal_flip(flip, spread, m, n, rng), params)
    north = sphere.basis_vector(m + 1)
    return SamplerSpec(sampler, north, _monte_carlo_var(sampler, north))


def triangle_base() -> np.ndarray:
    """Scalene planar triangle used by the concentrated landmark model."""
    return np.array([[0.0, 1.0, 0.3], [0.0, 0.0, 0.8]])


def sample_triangles(sigma: float, n: int, rng, base=None) -> np.ndarray:
    """Pre-shapes of a base triangle with isotropic landmark noise and a random rotation."""
    base = triangle_base() if base is None else np.asarray(base, dtype=float)
    rng = np.random.default_rng(rng)
    raw = base[None] + sigma * rng.standard_normal((n,) + base.shape)
    angle = rng.uniform(0.0, 2.0 * math.pi, n)
    c, s = np.cos(angle), np.sin(angle)
    rot = np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)
    return shapes.preshape(rot @ raw)


def _triangles(params):
    sigma = float(params.get("sigma", 0.05))
    space = preshape_space(2, 3)
    sampler = Sampler("shapes.triangle", space, lambda rng, n: sample_triangles(sigma, n, rng), params)
    truth = shapes.preshape(triangle_base())
    return SamplerSpec(sampler, truth, _monte_carlo_var(sampler, truth, size=20_000))


SAMPLERS: dict[str, Callable[[dict], SamplerSpec]] = {
    "circle.pow": lambda p: _circle_density_spec("circle.pow", circle.power_smeary_density(float(p["r"])), p),
    "circle.log": lambda p: _circle_density_spec("circle.log", circle.log_smeary_density(float(p["r"])), p),
    "circle.mixture": lambda p: _circle_density_spec(
        "circle.mixture", circle.uniform_mixture_density(float(p.get("weight", 0.5))), p),
    "circle.normal": _circle_normal,
    "circle.uniform": _circle_uniform,
    "sphere.halfsphere": _halfsphere,
    "sphere.flip": _flip,
    "shapes.triangle": _triangles,
}


def make_sampler(name: str, params: dict | None = None) -> SamplerSpec:
    params = dict(params or {})
    if name not in SAMPLERS:
        raise InvalidInput(f"unknown sampler {name!r}; known: {', '.join(sorted(SAMPLERS))}")
    try:
        return SAMPLERS[name](params)
    except KeyError as exc:
        raise InvalidInput(f"sampler {name!r} needs parameter {exc.args[0]!r}") from exc
