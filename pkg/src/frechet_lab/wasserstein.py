"""Exact 2-Wasserstein distances and barycenters for small discrete measures,
plus the strongly-convex/smooth interpolation check and its feasible region.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from . import _simplex
from .core import MeanSet
from .errors import Empty, InvalidInput, TooLarge

MAX_TRANSPORT_SUPPORT = 64
MAX_MEASURES = 4
MAX_ATOMS = 8
VERTEX_CAP = 16
MERGE_TOL = 1e-9


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely supported probability measure on R^m."""

    support: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.support, dtype=float))
        w = np.asarray(self.weights, dtype=float).ravel()
        if pts.shape[0] == 0 or pts.shape[0] != w.size:
            raise InvalidInput("need a nonempty support with one weight per point")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise InvalidInput("weights must be nonnegative and sum to 1")
        if pts.shape[0] > 1:
            gaps = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
            gaps[np.diag_indices(pts.shape[0])] = np.inf
            if gaps.min() <= 1e-12:
                raise InvalidInput("support points must be pairwise distinct")
        object.__setattr__(self, "support", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, support) -> "DiscreteMeasure":
        pts = np.atleast_2d(np.asarray(support, dtype=float))
        return cls(pts, np.full(pts.shape[0], 1.0 / pts.shape[0]))

    @classmethod
    def from_atoms(cls, points, weights, tol: float = MERGE_TOL) -> "DiscreteMeasure":
        """Merge points closer than ``tol`` and drop zero weights."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        w = np.asarray(weights, dtype=float)
        merged_pts: list[np.ndarray] = []
        merged_w: list[float] = []
        for p, wi in zip(pts, w):
            if wi <= 0:
                continue
            for i, q in enumerate(merged_pts):
                if np.linalg.norm(p - q) <= tol:
                    merged_w[i] += wi
                    break
            else:
                merged_pts.append(p)
                merged_w.append(float(wi))
        total = sum(merged_w)
        return cls(np.array(merged_pts), np.array(merged_w) / total)

    @property
    def dim(self) -> int:
        return self.support.shape[1]

    def __len__(self) -> int:
        return self.support.shape[0]

    def canonical_key(self) -> tuple:
        order = np.lexsort(self.support.T[::-1])
        return tuple((tuple(self.support[i].tolist()), float(self.weights[i])) for i in order)

    def to_dict(self) -> dict:
        return {"support": self.support.tolist(), "weights": self.weights.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "DiscreteMeasure":
        try:
            return cls(np.asarray(data["support"], dtype=float), np.asarray(data["weights"], dtype=float))
        except (KeyError, TypeError) as exc:
            raise InvalidInput(f"malformed measure: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "DiscreteMeasure":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True)
class TransportPlan:
    matrix: np.ndarray

    def check(self, mu: DiscreteMeasure, nu: DiscreteMeasure, tol: float = 1e-10) -> bool:
        p = self.matrix
        return bool(np.all(p >= -tol)
                    and np.allclose(p.sum(axis=1), mu.weights, atol=tol, rtol=0)
                    and np.allclose(p.sum(axis=0), nu.weights, atol=tol, rtol=0))

    def cost(self, mu: DiscreteMeasure, nu: DiscreteMeasure) -> float:
        return float(np.sum(self.matrix * sq_cost(mu.support, nu.support)))


def sq_cost(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.sum((x[:, None, :] - y[None, :, :]) ** 2, axis=-1)


def _transport_lp(a, b, cost):
    m, n = cost.shape
    rows = np.zeros((m + n, m * n))
    for i in range(m):
        rows[i, i * n:(i + 1) * n] = 1.0
    for j in range(n):
        rows[m + j, j::n] = 1.0
    return cost.ravel(), rows, np.concatenate([a, b])


def w2_squared(mu: DiscreteMeasure, nu: DiscreteMeasure) -> tuple[float, TransportPlan]:
    if len(mu) + len(nu) > MAX_TRANSPORT_SUPPORT:
        raise TooLarge(f"combined support {len(mu) + len(nu)} exceeds {MAX_TRANSPORT_SUPPORT}")
    if mu.dim != nu.dim:
        raise InvalidInput("measures live in different dimensions")
    if nu.canonical_key() < mu.canonical_key():
        # solve in one fixed orientation so W(mu, nu) == W(nu, mu) bit for bit
        value, plan = w2_squared(nu, mu)
        return value, TransportPlan(plan.matrix.T.copy())
    cost = sq_cost(mu.support, nu.support)
    c, a_eq, b_eq = _transport_lp(mu.weights, nu.weights, cost)
    res = _simplex.solve(c, a_eq, b_eq)
    plan = TransportPlan(res.x.reshape(cost.shape))
    return max(plan.cost(mu, nu), 0.0), plan


def w2_distance(mu: DiscreteMeasure, nu: DiscreteMeasure) -> tuple[float, TransportPlan]:
    """W_2(mu, nu) and an optimal plan, from an exact simplex solve."""
    value, plan = w2_squared(mu, nu)
    return math.sqrt(value), plan


def frechet_functional_w(measures, weights, candidate: DiscreteMeasure) -> float:
    """sum_i weights_i W_2^2(candidate, measure_i)."""
    w = _normalized(weights, len(measures))
    return float(sum(wi * w2_squared(candidate, mu)[0] for wi, mu in zip(w, measures)))


def _normalized(weights, k):
    w = np.full(k, 1.0 / k) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (k,) or np.any(w < 0) or w.sum() <= 0:
        raise InvalidInput("one nonnegative weight per measure required")
    return w / w.sum()


def barycenter_multimarginal(measures, weights=None, cap: int = VERTEX_CAP) -> MeanSet:
    """Barycenters from optimal vertices of the multi-marginal transport LP.

    Each tuple ``(x_1, ..., x_K)`` of support points costs
    ``sum_k w_k |x_k - xbar|^2`` with ``xbar = sum_k w_k x_k``; an optimal plan
    pushed forward by ``xbar`` is a barycenter.  Alternative optimal vertices
    are enumerated (up to ``cap`` bases) to expose non-uniqueness.
    """
    measures = list(measures)
    k = len(measures)
    if k == 0:
        raise InvalidInput("need at least one measure")
    if k > MAX_MEASURES or any(len(mu) > MAX_ATOMS for mu in measures):
        raise TooLarge(f"at most {MAX_MEASURES} measures with {MAX_ATOMS} atoms each")
    if len({mu.dim for mu in measures}) != 1:
        raise InvalidInput("measures live in different dimensions")
    w = _normalized(weights, k)
    sizes = [len(mu) for mu in measures]
    tuples = list(itertools.product(*(range(s) for s in sizes)))
    pts = np.array([[measures[i].support[t[i]] for i in range(k)] for t in tuples])
    xbar = np.einsum("k,tkd->td", w, pts)
    cost = np.einsum("k,tk->t", w, np.sum((pts - xbar[:, None, :]) ** 2, axis=-1))

    offsets = np.cumsum([0] + sizes)
    a_eq = np.zeros((offsets[-1], len(tuples)))
    for col, t in enumerate(tuples):
        for i in range(k):
            a_eq[offsets[i] + t[i], col] = 1.0
    b_eq = np.concatenate([mu.weights for mu in measures])
    res = _simplex.solve(cost, a_eq, b_eq)

    bary: list[DiscreteMeasure] = []
    for plan in _simplex.optimal_vertices(res, cap=cap):
        nu = DiscreteMeasure.from_atoms(xbar, plan)
        if not any(nu.canonical_key() == other.canonical_key() for other in bary):
            bary.append(nu)
    diameter = 0.0
    for i in range(len(bary)):
        for j in range(i + 1, len(bary)):
            diameter = max(diameter, w2_distance(bary[i], bary[j])[0])
    return MeanSet(bary, max(res.value, 0.0), diameter, info={"lp_value": res.value})


# ----------------------------------------------------------------------------
# Interpolation by alpha-strongly convex, beta-smooth functions


def interpolation_feasible(alpha: float, beta: float, data, tol: float = 1e-12) -> bool:
    """Whether (point, gradient, value) triples admit such an interpolant.

    Checks, for every ordered pair i != j,
    f_i >= f_j + <g_j, x_i - x_j>
           + (|g_i - g_j|^2 / beta + alpha |x_i - x_j|^2
              - 2 (alpha / beta) <g_j - g_i, x_j - x_i>) / (2 (1 - alpha / beta)).
    Negative ``alpha`` is evaluated formally.
    """
    if not beta > 0 or alpha >= beta:
        raise InvalidInput("need beta > 0 and alpha < beta")
    pts = [(np.asarray(x, dtype=float), np.asarray(g, dtype=float), float(f)) for x, g, f in data]
    ratio = alpha / beta
    for (xi, gi, fi), (xj, gj, fj) in itertools.permutations(pts, 2):
        dx = xi - xj
        dg = gi - gj
        lhs = fi - fj - gj @ dx
        rhs = (dg @ dg / beta + alpha * (dx @ dx) - 2.0 * ratio * ((-dg) @ (-dx))) / (2.0 * (1.0 - ratio))
        if lhs < rhs - tol * max(1.0, abs(rhs)):
            return False
    return True


@dataclass(frozen=True)
class FeasibleRegion:
    """Closed beta-interval admissible at a given gamma = beta - alpha."""

    gamma: float
    beta_lo: float
    beta_hi: float

    def __post_init__(self):
        if self.beta_lo > self.beta_hi:
            raise InvalidInput("beta_lo must not exceed beta_hi")

    def contains(self, beta: float, tol: float = 0.0) -> bool:
        return self.beta_lo - tol <= beta <= self.beta_hi + tol


def feasible_region(gamma: float) -> FeasibleRegion:
    """(gamma + 2 -+ sqrt(gamma^2 - 4)) / 2 for gamma >= 2."""
    if gamma < 2.0:
        raise Empty("no admissible beta for gamma < 2")
    root = math.sqrt((gamma - 2.0) * (gamma + 2.0))
    return FeasibleRegion(gamma, 0.5 * (gamma + 2.0 - root), 0.5 * (gamma + 2.0 + root))


def example_points() -> dict[str, np.ndarray]:
    """A, B and the midpoints E (of A, -B) and F (of A, B) in the plane."""
    a = np.array([0.0, 1.0])
    b = np.array([1.0, 0.0])
    return {"A": a, "B": b, "E": 0.5 * (a - b), "F": 0.5 * (a + b)}


def symmetric_pair(point) -> DiscreteMeasure:
    p = np.asarray(point, dtype=float)
    return DiscreteMeasure(np.vstack([p, -p]), np.array([0.5, 0.5]))


def interpolation_data(point, grad, swapped: bool = False, value: float = 0.0) -> list:
    """Triples (x, g, f) for +-point mapped to +-grad (or -+grad when swapped)."""
    p = np.asarray(point, dtype=float)
    g = np.asarray(grad, dtype=float)
    s = -1.0 if swapped else 1.0
    return [(p, s * g, value), (-p, -s * g, value)]
