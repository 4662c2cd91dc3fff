"""Extrinsic and intrinsic means on the unit sphere S^m in R^(m+1)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .core import WHOLE_SPACE, MeanSet
from .errors import AntipodalPoint, InvalidInput, MaxIterations, OutOfRegime

_FLOAT_EPS = np.finfo(float).eps

# every point of the sphere minimizes the extrinsic Fréchet function
WholeSphere = WHOLE_SPACE


@dataclass(frozen=True)
class SpherePoint:
    coords: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float).ravel()
        if c.size < 2 or abs(np.linalg.norm(c) - 1.0) > 1e-12:
            raise InvalidInput("sphere points must have unit norm (tolerance 1e-12)")
        object.__setattr__(self, "coords", c)

    @property
    def m(self) -> int:
        return self.coords.size - 1

    def canonical_key(self) -> tuple:
        return tuple(self.coords.tolist())


def as_points(sample) -> np.ndarray:
    x = np.atleast_2d(np.asarray(sample, dtype=float))
    if x.shape[0] == 0:
        raise InvalidInput("sample must be nonempty")
    norms = np.linalg.norm(x, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-12):
        raise InvalidInput("sphere points must have unit norm (tolerance 1e-12)")
    return x


def _weights(n, weights):
    if weights is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(weights, dtype=float)
    if w.shape != (n,) or np.any(w < 0) or w.sum() <= 0:
        raise InvalidInput("weights must be nonnegative, one per point")
    return w / w.sum()


def normalize(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def basis_vector(dim: int, i: int = 0) -> np.ndarray:
    e = np.zeros(dim)
    e[i] = 1.0
    return e


def geodesic_distance(x, y):
    """arccos<x, y>, evaluated as 2 atan2(|x - y|, |x + y|) for accuracy."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    d = 2.0 * np.arctan2(np.linalg.norm(x - y, axis=-1), np.linalg.norm(x + y, axis=-1))
    return float(d) if np.ndim(d) == 0 else d


def chordal_distance(x, y):
    d = np.linalg.norm(np.asarray(x, dtype=float) - np.asarray(y, dtype=float), axis=-1)
    return float(d) if np.ndim(d) == 0 else d


def exp_map(x, v) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    t = np.linalg.norm(v)
    if t < 1e-300:
        return x.copy()
    return normalize(math.cos(t) * x + math.sin(t) * (v / t))


def _logs(x: np.ndarray, ys: np.ndarray):
    """Rows log_x(y_i) together with angles, tangent parts and their norms."""
    c = ys @ x
    u = ys - c[:, None] * x[None, :]
    s = np.linalg.norm(u, axis=1)
    if np.any((s < 1e-12) & (c < 0)):
        raise AntipodalPoint("log map undefined at the antipode of the base point")
    theta = np.arctan2(s, c)
    scale = np.where(s > 1e-300, theta / np.where(s > 1e-300, s, 1.0), 1.0)
    return u * scale[:, None], theta, u, s


def log_map(x, y) -> np.ndarray:
    """Inverse exponential map at ``x``; ``y`` may be a single point or rows."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    logs, *_ = _logs(x, np.atleast_2d(y))
    return logs[0] if y.ndim == 1 else logs


def north_pole_chart(points) -> np.ndarray:
    """exp_xi^{-1} at the north pole e_1, in coordinates (e_2, ..., e_{m+1})."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    logs = log_map(basis_vector(pts.shape[1]), pts)
    logs = np.atleast_2d(logs)[:, 1:]
    return logs[0] if np.ndim(points) == 1 else logs


def tangent_basis(x: np.ndarray) -> np.ndarray:
    """Orthonormal basis (columns) of the tangent space at ``x``."""
    dim = x.size
    e = basis_vector(dim)
    sgn = 1.0 if x[0] >= 0 else -1.0
    v = x + sgn * e
    house = np.eye(dim) - 2.0 * np.outer(v, v) / (v @ v)
    return house[:, 1:]


def frechet_function_intrinsic(sample, x, weights=None) -> float:
    pts = np.atleast_2d(np.asarray(sample, dtype=float))
    w = _weights(pts.shape[0], weights)
    d = geodesic_distance(pts, np.asarray(x, dtype=float)[None, :])
    return float(w @ (d * d))


# ----------------------------------------------------------------------------
# Extrinsic mean


def extrinsic_mean(sample, weights=None) -> MeanSet:
    """Projection of the ambient mean; every point minimizes when it vanishes."""
    pts = as_points(sample)
    w = _weights(pts.shape[0], weights)
    mean_vec = w @ pts
    norm = float(np.linalg.norm(mean_vec))
    second = float(w @ np.sum(pts * pts, axis=1))
    if norm > 1e-12:
        return MeanSet(minimizers=[mean_vec / norm], frechet_value=1.0 + second - 2.0 * norm,
                       diameter=0.0)
    return MeanSet(minimizers=WHOLE_SPACE, frechet_value=1.0 + second, diameter=2.0,
                   unique=False)


def extrinsic_clt_cov(sample_or_moments) -> np.ndarray:
    """C Sigma C^T with C = (I - mu mu^T) / |E X| for the extrinsic mean CLT.

    Accepts either a sample (rows) or a ``(mean_vector, covariance)`` pair.
    """
    if isinstance(sample_or_moments, tuple):
        mean_vec, cov = (np.asarray(a, dtype=float) for a in sample_or_moments)
    else:
        pts = as_points(sample_or_moments)
        mean_vec = pts.mean(axis=0)
        cov = np.cov(pts, rowvar=False, bias=True)
    norm = float(np.linalg.norm(mean_vec))
    if norm <= 1e-12:
        raise OutOfRegime("extrinsic CLT needs a nonzero ambient mean")
    mu = mean_vec / norm
    c = (np.eye(mu.size) - np.outer(mu, mu)) / norm
    return c @ cov @ c.T


# ----------------------------------------------------------------------------
# Intrinsic mean


def _default_init(pts, w):
    ext = w @ pts
    if np.linalg.norm(ext) > 1e-12:
        return ext / np.linalg.norm(ext)
    return normalize(np.random.default_rng(0).standard_normal(pts.shape[1]))


class _Objective:
    """F(x) = sum_i w_i d^2(x, X_i) with the per-atom geometry kept for reuse."""

    def __init__(self, pts, w):
        self.pts, self.w = pts, w
        self.noise = 64.0 * _FLOAT_EPS * math.sqrt(pts.shape[0])

    def at(self, x):
        logs, theta, u, s = _logs(x, self.pts)
        return float(self.w @ (theta * theta)), (logs, theta, u, s)

    def accepts(self, f_new, f_old):
        # rounding noise of an n-term sum; below it every step looks like a non-decrease
        return f_new <= f_old + self.noise * max(1.0, abs(f_old))

    def line_search(self, x, fx, direction):
        """Halve the step from 1 until F does not increase."""
        step = 1.0
        while True:
            cand = exp_map(x, step * direction)
            fc, geom = self.at(cand)
            if self.accepts(fc, fx) or step < 1e-12:
                return cand, fc, geom
            step *= 0.5


def _start(pts, w, init):
    return _default_init(pts, w) if init is None else normalize(init)


def intrinsic_mean_gd(sample, init=None, tol: float = 1e-10, max_iter: int = 10_000,
                      weights=None) -> MeanSet:
    """Karcher iteration x <- exp_x(step * mean log_x(X_i)).

    Starts at step 1 and halves the step while the Fréchet function does not
    decrease.  Stops once the mean log vector has norm below ``tol``.
    """
    pts = as_points(sample)
    w = _weights(pts.shape[0], weights)
    obj = _Objective(pts, w)
    x = _start(pts, w, init)
    fx, geom = obj.at(x)
    for it in range(max_iter):
        grad = w @ geom[0]
        if float(np.linalg.norm(grad)) < tol:
            return MeanSet([x], fx, 0.0, info={"converged": True, "iterations": it})
        x, fx, geom = obj.line_search(x, fx, grad)
    raise MaxIterations(f"no convergence within {max_iter} iterations", last_iterate=x)


def intrinsic_mean(sample, init=None, tol: float = 1e-10, max_iter: int = 500,
                   weights=None) -> MeanSet:
    """Intrinsic mean by damped Riemannian Newton steps.

    The Hessian of x -> d^2(x, y)/2 in tangent coordinates is
    a a^T + t cot(t) (I - a a^T) with t = d(x, y) and a the unit direction
    to y.  An indefinite Hessian is shifted to be positive definite, so saddle
    valleys are left quickly.  Needed near flat minima, where Karcher steps
    crawl.
    """
    pts = as_points(sample)
    w = _weights(pts.shape[0], weights)
    obj = _Objective(pts, w)
    x = _start(pts, w, init)
    fx, geom = obj.at(x)
    for it in range(max_iter):
        logs, theta, u, s = geom
        mean_log = w @ logs
        if float(np.linalg.norm(mean_log)) < tol:
            return MeanSet([x], fx, 0.0, info={"converged": True, "iterations": it})
        basis = tangent_basis(x)
        small = theta < 1e-8
        kappa = np.where(small, 1.0, theta * np.cos(theta) / np.where(small, 1.0, np.sin(theta)))
        a = (u @ basis) / np.where(s > 1e-300, s, 1.0)[:, None]
        hess = np.sum(w * kappa) * np.eye(basis.shape[1]) + (a * (w * (1.0 - kappa))[:, None]).T @ a
        eig = np.linalg.eigvalsh(hess)
        if eig[0] <= 1e-10:
            # indefinite: shift so negative-curvature directions are followed
            hess = hess + (1e-3 * max(eig[-1], 1e-6) - eig[0]) * np.eye(eig.size)
        direction = basis @ np.linalg.solve(hess, basis.T @ mean_log)
        length = float(np.linalg.norm(direction))
        if length > math.pi / 2:
            direction *= (math.pi / 2) / length
        x, fx, geom = obj.line_search(x, fx, direction)
    raise MaxIterations(f"no convergence within {max_iter} iterations", last_iterate=x)


# ----------------------------------------------------------------------------
# Half-sphere mixture family


def gamma_m(m: int) -> float:
    """(sqrt(pi)/2) Gamma((m+1)/2) / Gamma((m+2)/2) via log-Gamma."""
    if m < 1 or int(m) != m:
        raise InvalidInput("m must be a positive integer")
    return 0.5 * math.sqrt(math.pi) * math.exp(gammaln((m + 1) / 2.0) - gammaln((m + 2) / 2.0))


@dataclass(frozen=True)
class HalfSphereMixture:
    """alpha * uniform(lower half-sphere) + (1 - alpha) * Dirac(north pole)."""

    alpha: float
    m: int

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise InvalidInput("alpha must lie in (0, 1)")
        if self.m < 2:
            raise InvalidInput("m must be at least 2")

    @property
    def critical_alpha(self) -> float:
        return 1.0 / (1.0 + gamma_m(self.m))

    @property
    def north_pole(self) -> np.ndarray:
        return basis_vector(self.m + 1)

    def sample(self, n: int, seed) -> np.ndarray:
        return sample_halfsphere_mixture(self.alpha, self.m, n, seed)


def critical_alpha(m: int) -> float:
    return 1.0 / (1.0 + gamma_m(m))


def uniform_lower_half(n: int, m: int, rng) -> np.ndarray:
    z = normalize(rng.standard_normal((n, m + 1)))
    z[:, 0] = -np.abs(z[:, 0])
    return z


def sample_halfsphere_mixture(alpha: float, m: int, n: int, seed) -> np.ndarray:
    if not 0.0 < alpha < 1.0:
        raise InvalidInput("alpha must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    lower = rng.random(n) < alpha
    out = np.tile(basis_vector(m + 1), (n, 1))
    out[lower] = uniform_lower_half(int(lower.sum()), m, rng)
    return out


def sample_antipodal_flip(flip: float, spread: float, m: int, n: int, seed) -> np.ndarray:
    """Concentrated cloud around e_1, each point negated with probability ``flip``.

    The tangent covariance at e_1 does not depend on ``flip`` while the ambient
    mean shrinks by the factor (1 - 2 flip), isolating the 1/|E X| effect.
    """
    if not 0.0 <= flip < 0.5:
        raise InvalidInput("flip probability must lie in [0, 1/2)")
    rng = np.random.default_rng(seed)
    y = normalize(basis_vector(m + 1) + spread * rng.standard_normal((n, m + 1)))
    sign = np.where(rng.random(n) < flip, -1.0, 1.0)
    return y * sign[:, None]
