"""Intrinsic means on the circle [-pi, pi) with arc-length distance.

The empirical Fréchet function of ``rho = d**2`` is piecewise quadratic with
unit leading coefficient; its breaks sit at the antipodes of the atoms.
:func:`intrinsic_mean_exact` exploits this to find every global minimizer in
O(n log n).  :func:`brute_force_mean` is the independent grid oracle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .core import MeanSet, pairwise_diameter
from .errors import InvalidDensity, InvalidInput, OutOfDomain, OutOfRegime

TWO_PI = 2.0 * math.pi
MERGE_TOL = 1e-9


def wrap(angle):
    """Map angles into the canonical range [-pi, pi)."""
    out = np.mod(np.asarray(angle, dtype=float) + math.pi, TWO_PI) - math.pi
    # mod can round up to exactly pi for inputs just below -pi
    out = np.where(out >= math.pi, -math.pi, out)
    return float(out) if np.ndim(out) == 0 else out


def arc_distance(x, y):
    """min(|x - y|, 2pi - |x - y|) for angles in canonical range."""
    diff = np.abs(wrap(x) - wrap(y))
    d = np.minimum(diff, TWO_PI - diff)
    return float(d) if np.ndim(d) == 0 else d


@dataclass(frozen=True)
class CirclePoint:
    """An angle, wrapped into [-pi, pi) on construction."""

    angle: float

    def __post_init__(self):
        if not math.isfinite(self.angle):
            raise InvalidInput("angle must be finite")
        object.__setattr__(self, "angle", wrap(float(self.angle)))

    def __float__(self) -> float:
        return self.angle

    def canonical_key(self) -> tuple:
        return (self.angle,)


def antipode(a: float) -> float:
    return wrap(a + math.pi)


def _weights(atoms, weights):
    atoms = wrap(np.atleast_1d(np.asarray(atoms, dtype=float)))
    if atoms.size == 0:
        raise InvalidInput("sample must be nonempty")
    if weights is None:
        w = np.full(atoms.size, 1.0 / atoms.size)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != atoms.shape or np.any(w < 0) or w.sum() <= 0:
            raise InvalidInput("weights must be nonnegative, one per atom")
        w = w / w.sum()
    return atoms, w


def frechet_function(atoms, x, weights=None):
    """F(x) = sum_i w_i d(x, atom_i)^2, vectorized over ``x``."""
    atoms, w = _weights(atoms, weights)
    x = np.atleast_1d(wrap(x))
    d = arc_distance(x[:, None], atoms[None, :])
    vals = (d * d) @ w
    return float(vals[0]) if vals.size == 1 else vals


def _merge(points, tol=MERGE_TOL):
    merged = []
    for p in sorted(points):
        if not any(arc_distance(p, q) <= tol for q in merged):
            merged.append(p)
    return merged


def intrinsic_mean_exact(atoms, weights=None) -> MeanSet:
    """Global minimizers of the empirical intrinsic Fréchet function.

    Sweeping x from -pi to pi, each atom's nearest lift jumps by +2pi when x
    crosses the atom's antipode.  Between consecutive antipodes the Fréchet
    function is ``(x - m)^2 + s - m^2`` with m, s the weighted first and
    second moments of the current lifts; its minimum on the arc is at m
    clamped into the arc.
    """
    original, w = _weights(atoms, weights)
    # sweep in coordinates centred on the first atom; keeps Dirac samples exact
    ref = float(original[0])
    theta = wrap(original - ref)
    lifted = np.where(theta > 0, theta - TWO_PI, theta)
    crossing = np.where(theta > 0, theta - math.pi, theta + math.pi)
    order = np.argsort(crossing, kind="stable")
    crossing, w_s, y_s = crossing[order], w[order], lifted[order]

    m0 = float(w @ lifted)
    s0 = float(w @ (lifted * lifted))
    m = np.concatenate([[m0], m0 + np.cumsum(TWO_PI * w_s)])
    s = np.concatenate([[s0], s0 + np.cumsum(w_s * (2.0 * TWO_PI * y_s + TWO_PI**2))])
    lo = np.concatenate([[-math.pi], crossing])
    hi = np.concatenate([crossing, [math.pi]])

    x = np.clip(m, lo, hi)
    values = (x - m) ** 2 + s - m * m
    best = values.min()
    tie = 1e-12 * max(1.0, abs(best))
    candidates = _merge([wrap(v + ref) for v in x[values <= best + tie]])
    direct = [frechet_function(original, c, w) for c in candidates]
    return MeanSet(minimizers=candidates, frechet_value=float(np.mean(direct)),
                   diameter=pairwise_diameter(candidates, arc_distance))


def _golden_section(f: Callable[[float], float], a: float, b: float, tol: float = 1e-12,
                    max_iter: int = 200) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) < tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def brute_force_mean(atoms, grid_size: int = 100_000, weights=None) -> MeanSet:
    """Grid search plus golden-section refinement; oracle for the exact solver.

    Every grid-local minimum whose value is close to the best grid value is
    refined on its two neighbouring cells, so near-ties between separate
    basins are not decided by grid resolution.
    """
    if grid_size < 1000:
        raise InvalidInput("grid_size must be at least 1000")
    theta, w = _weights(atoms, weights)
    grid = -math.pi + TWO_PI * np.arange(grid_size) / grid_size
    vals = np.empty(grid_size)
    # cache-sized blocks; d = pi - |pi - |x - theta|| is the arc distance
    chunk = max(1, 32768 // theta.size)
    buf = np.empty((chunk, theta.size))
    for start in range(0, grid_size, chunk):
        g = grid[start:start + chunk, None]
        b = buf[:g.shape[0]]
        np.subtract(g, theta[None, :], out=b)
        np.abs(b, out=b)
        np.subtract(math.pi, b, out=b)
        np.abs(b, out=b)
        np.subtract(math.pi, b, out=b)
        np.multiply(b, b, out=b)
        np.dot(b, w, out=vals[start:start + chunk])
    h = TWO_PI / grid_size
    local = np.flatnonzero((vals <= np.roll(vals, 1)) & (vals <= np.roll(vals, -1)))
    slack = 4.0 * h * (math.pi + 1.0)
    local = local[vals[local] <= vals.min() + slack]

    def f(x):
        # valid for x within one cell outside [-pi, pi): squares still give d^2
        d = math.pi - np.abs(math.pi - np.abs(x - theta))
        return float(d @ (d * w))

    refined = [wrap(_golden_section(f, grid[i] - h, grid[i] + h)) for i in local]
    refined_vals = np.array([f(x) for x in refined])
    best = refined_vals.min()
    keep = [x for x, v in zip(refined, refined_vals) if v <= best + 1e-10 * max(1.0, best)]
    minimizers = _merge(keep, tol=1e-6)
    return MeanSet(minimizers=minimizers, frechet_value=float(best),
                   diameter=pairwise_diameter(minimizers, arc_distance))


# ----------------------------------------------------------------------------
# Example densities


@dataclass(frozen=True)
class CircleDensity:
    """Piecewise closed-form density on [-pi, pi) with respect to arc length."""

    kind: str
    params: dict
    pdf: Callable[[np.ndarray], np.ndarray]
    breakpoints: tuple
    envelope: float
    extra: dict = field(default_factory=dict)

    def __call__(self, x):
        return self.pdf(np.asarray(x, dtype=float))

    def _integrate(self, g) -> float:
        pts = sorted(set(self.breakpoints) | {-math.pi, math.pi})
        return sum(integrate.quad(g, a, b, limit=200, epsabs=1e-13, epsrel=1e-12)[0]
                   for a, b in zip(pts, pts[1:]))

    def total_mass(self) -> float:
        return self._integrate(lambda x: float(self.pdf(np.array(x))))

    def second_moment(self) -> float:
        """Euclidean variance E[X^2] of the [-pi, pi) representative."""
        return self._integrate(lambda x: x * x * float(self.pdf(np.array(x))))

    def antipode_density(self) -> float:
        """Limit of the density at -pi (equivalently at pi)."""
        return float(self.pdf(np.array(-math.pi)))

    def sample(self, n: int, rng) -> np.ndarray:
        """Rejection sampling with a uniform proposal on [-pi, pi)."""
        rng = np.random.default_rng(rng)
        out = np.empty(0)
        accept_rate = 1.0 / (TWO_PI * self.envelope)
        while out.size < n:
            batch = int(1.1 * (n - out.size) / accept_rate) + 16
            x = rng.uniform(-math.pi, math.pi, batch)
            u = rng.uniform(0.0, self.envelope, batch)
            out = np.concatenate([out, x[u < self.pdf(x)]])
        return out[:n]


def power_smeary_density(r: float) -> CircleDensity:
    if r <= 0:
        raise InvalidInput("r must be positive")
    mid = ((math.pi - 1.0) * r + math.pi) / (math.pi * r + math.pi)

    def pdf(x):
        x = np.asarray(x, dtype=float)
        out = np.where(np.abs(x) <= 0.5, mid, 0.0)
        right = (x >= math.pi - 1.0) & (x < math.pi)
        left = (x >= -math.pi) & (x <= -math.pi + 1.0)
        out = np.where(right, (1.0 - np.abs(math.pi - x) ** r) / TWO_PI, out)
        out = np.where(left, (1.0 - np.abs(math.pi + x) ** r) / TWO_PI, out)
        return out

    return CircleDensity("power", {"r": r}, pdf,
                         (-math.pi + 1.0, -0.5, 0.5, math.pi - 1.0),
                         envelope=max(mid, 1.0 / TWO_PI), extra={"mid": mid})


def _log_g_prime(u, r):
    """Derivative of exp(-1/u^r), zero at u <= 0."""
    u = np.asarray(u, dtype=float)
    pos = u > 0
    safe = np.where(pos, u, 1.0)
    val = r * np.exp(-safe ** (-r) - (r + 1.0) * np.log(safe))
    return np.where(pos, val, 0.0)


def log_smeary_constant(r: float) -> float:
    """Density level on [-1/2, 1/2] that makes the log-smeary law a probability."""
    tail = integrate.quad(lambda u: max(1.0 - float(_log_g_prime(u, r)), 0.0) / TWO_PI,
                          0.0, 0.5, limit=200, epsabs=1e-14, epsrel=1e-13)[0]
    c = 1.0 - 2.0 * tail
    if not c > 1.0 / TWO_PI:
        raise InvalidDensity(f"normalizing constant {c} is not above 1/(2 pi)")
    return c


def log_smeary_density(r: float) -> CircleDensity:
    if r <= 0:
        raise InvalidInput("r must be positive")
    c = log_smeary_constant(r)

    def pdf(x):
        x = np.asarray(x, dtype=float)
        out = np.where(np.abs(x) <= 0.5, c, 0.0)
        right = (x >= math.pi - 0.5) & (x < math.pi)
        left = (x >= -math.pi) & (x <= -math.pi + 0.5)
        tail_r = np.maximum(1.0 - _log_g_prime(math.pi - x, r), 0.0) / TWO_PI
        tail_l = np.maximum(1.0 - _log_g_prime(math.pi + x, r), 0.0) / TWO_PI
        out = np.where(right, tail_r, out)
        out = np.where(left, tail_l, out)
        return out

    return CircleDensity("log", {"r": r, "c_r": c}, pdf,
                         (-math.pi + 0.5, -0.5, 0.5, math.pi - 0.5),
                         envelope=max(c, 1.0 / TWO_PI), extra={"c_r": c})


def uniform_mixture_density(weight: float, half_width: float = 0.5) -> CircleDensity:
    """``weight`` * uniform(circle) + (1 - weight) * uniform[-h, h].

    The antipodal density is ``weight / (2 pi)``; the intrinsic mean is 0 and
    unique for ``weight < 1``.
    """
    if not 0.0 <= weight < 1.0 or not 0.0 < half_width < math.pi / 2:
        raise InvalidInput("need 0 <= weight < 1 and 0 < half_width < pi/2")
    base = weight / TWO_PI
    bump = (1.0 - weight) / (2.0 * half_width)

    def pdf(x):
        x = np.asarray(x, dtype=float)
        return base + np.where(np.abs(x) <= half_width, bump, 0.0)

    return CircleDensity("custom", {"weight": weight, "half_width": half_width}, pdf,
                         (-half_width, half_width), envelope=base + bump)


def sample_power_smeary(r: float, n: int, seed) -> np.ndarray:
    return power_smeary_density(r).sample(n, seed)


def sample_log_smeary(r: float, n: int, seed) -> np.ndarray:
    return log_smeary_density(r).sample(n, seed)


# ----------------------------------------------------------------------------
# CLT quantities


@dataclass(frozen=True)
class SmearyModulus:
    G: Callable[[np.ndarray], np.ndarray]
    G_prime: Callable[[np.ndarray], np.ndarray]
    delta: float

    def check(self, points: int = 200) -> bool:
        """G(0) = G'(0) = 0, G >= 0 on [0, delta), strictly convex near 0."""
        eps = np.linspace(0.0, self.delta, points, endpoint=False)
        g = self.G(eps)
        if abs(float(self.G(np.array(0.0)))) > 0 or abs(float(self.G_prime(np.array(0.0)))) > 0:
            return False
        if np.any(g < 0):
            return False
        near = np.linspace(self.delta / 100.0, self.delta / 2.0, points)
        second = np.diff(self.G(near), 2)
        return bool(np.all(second > 0))


def power_modulus(r: float) -> SmearyModulus:
    return SmearyModulus(G=lambda e: np.asarray(e, dtype=float) ** (r + 1) / (TWO_PI * (r + 1)),
                         G_prime=lambda e: np.asarray(e, dtype=float) ** r / TWO_PI,
                         delta=1.0)


def log_modulus(r: float) -> SmearyModulus:
    def G(e):
        e = np.asarray(e, dtype=float)
        safe = np.where(e > 0, e, 1.0)
        return np.where(e > 0, np.exp(-safe ** (-r)), 0.0) / TWO_PI

    return SmearyModulus(G=G, G_prime=lambda e: _log_g_prime(e, r) / TWO_PI, delta=0.5)


def clt_variance_part_i(sigma2: float, f_antipode: float) -> float:
    """Limiting variance of sqrt(n) * mean when the antipodal density is below 1/(2 pi)."""
    if f_antipode < 0:
        raise InvalidInput("density cannot be negative")
    if f_antipode >= 1.0 / TWO_PI:
        raise OutOfRegime("antipodal density must be strictly below 1/(2 pi)")
    return sigma2 * (1.0 - TWO_PI * f_antipode) ** -2


def rescaled_statistic_part_ii(mean_estimate, G: SmearyModulus, n: int):
    """sqrt(n) * sign(mean) * 2 pi * G(|mean|); asymptotically N(0, sigma^2)."""
    mu = np.asarray(wrap(mean_estimate), dtype=float)
    if np.any(np.abs(mu) >= G.delta):
        raise OutOfDomain(f"|mean| must be below delta = {G.delta}")
    out = math.sqrt(n) * np.sign(mu) * TWO_PI * G.G(np.abs(mu))
    return float(out) if out.ndim == 0 else out


def log_smeary_statistics(mean_estimate, r: float, n: int):
    """The two rescalings of a log-smeary sample mean.

    Returns ``(scaled, centred)``: ``(log sqrt n)^(1/r) * mean``, which
    concentrates on {-1, +1}, and
    ``r (log sqrt n)^((1+r)/r) * (mean - sign(mean) / (log sqrt n)^(1/r))``.
    """
    mu = np.asarray(wrap(mean_estimate), dtype=float)
    ell = math.log(math.sqrt(n))
    scaled = ell ** (1.0 / r) * mu
    centred = r * ell ** ((1.0 + r) / r) * (mu - np.sign(mu) / ell ** (1.0 / r))
    return scaled, centred
