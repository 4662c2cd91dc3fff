"""Kendall pre-shapes: residual and Procrustes distances and means.

Pre-shapes are ``m x (k-1)`` matrices of unit Frobenius norm.  ``vec`` stacks
columns.  The residual distance identifies ``x`` with ``-x``; reported
representatives are the sign whose ``vec`` is lexicographically larger.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import MeanSet
from .errors import DegenerateEigengap, InvalidInput, MaxIterations, OutOfDomain

EIGENGAP_TOL = 1e-9
DEGENERATE_TOL = 1e-12


def vec(x) -> np.ndarray:
    return np.asarray(x, dtype=float).reshape(-1, order="F")


def unvec(v, m: int) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return v.reshape((m, v.size // m), order="F")


def vec_rows(configs: np.ndarray) -> np.ndarray:
    """Row ``i`` is ``vec(configs[i])``."""
    return np.ascontiguousarray(configs.transpose(0, 2, 1)).reshape(configs.shape[0], -1)


def unvec_rows(rows: np.ndarray, m: int) -> np.ndarray:
    n = rows.shape[0]
    return rows.reshape(n, -1, m).transpose(0, 2, 1)


def canonical_sign(x) -> np.ndarray:
    """Representative of {x, -x} whose first nonzero vec entry is positive."""
    x = np.asarray(x, dtype=float)
    flat = vec(x)
    nz = np.flatnonzero(flat)
    if nz.size and flat[nz[0]] < 0:
        return -x
    return x


@dataclass(frozen=True)
class PreShape:
    config: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.config, dtype=float)
        if c.ndim != 2 or c.shape[0] < 2 or c.shape[1] < c.shape[0]:
            raise InvalidInput("pre-shape needs shape m x (k-1) with m >= 2, k >= m + 1")
        if abs(np.linalg.norm(c) - 1.0) > 1e-12:
            raise InvalidInput("pre-shape must have unit Frobenius norm (tolerance 1e-12)")
        object.__setattr__(self, "config", c)

    @property
    def m(self) -> int:
        return self.config.shape[0]

    @property
    def k(self) -> int:
        return self.config.shape[1] + 1

    def canonical_key(self) -> tuple:
        return tuple(vec(canonical_sign(self.config)).tolist())


def as_configs(sample) -> np.ndarray:
    """Stack a sample of pre-shapes into an ``(n, m, k-1)`` array."""
    if isinstance(sample, PreShape):
        sample = [sample]
    arr = np.asarray([s.config if isinstance(s, PreShape) else s for s in sample], dtype=float)
    if arr.ndim == 2:
        arr = arr[None]
    if arr.ndim != 3 or arr.shape[0] == 0:
        raise InvalidInput("sample must be a nonempty stack of m x (k-1) matrices")
    norms = np.linalg.norm(arr, axis=(1, 2))
    if np.any(np.abs(norms - 1.0) > 1e-12):
        raise InvalidInput("pre-shapes must have unit Frobenius norm (tolerance 1e-12)")
    return arr


def _weights(n, weights):
    if weights is None:
        return np.full(n, 1.0 / n)
    w = np.asarray(weights, dtype=float)
    if w.shape != (n,) or np.any(w < 0) or w.sum() <= 0:
        raise InvalidInput("weights must be nonnegative, one per atom")
    return w / w.sum()


# ----------------------------------------------------------------------------
# Preprocessing


def helmert_submatrix(k: int) -> np.ndarray:
    """(k-1) x k matrix with orthonormal rows orthogonal to the ones vector."""
    if k < 2:
        raise InvalidInput("need at least 2 landmarks")
    h = np.zeros((k - 1, k))
    for j in range(1, k):
        h[j - 1, :j] = -1.0 / math.sqrt(j * (j + 1))
        h[j - 1, j] = j / math.sqrt(j * (j + 1))
    return h


def preshape(raw) -> np.ndarray:
    """Centre an ``m x k`` landmark matrix (Helmert basis) and scale to unit norm."""
    raw = np.asarray(raw, dtype=float)
    single = raw.ndim == 2
    raw = raw[None] if single else raw
    centred = raw @ helmert_submatrix(raw.shape[2]).T
    size = np.linalg.norm(centred, axis=(1, 2))
    if np.any(size < 1e-300):
        raise InvalidInput("all landmarks coincide; size is zero")
    out = centred / size[:, None, None]
    return out[0] if single else out


# ----------------------------------------------------------------------------
# Distances and alignment


def _check_pair(x, y):
    x = np.asarray(x.config if isinstance(x, PreShape) else x, dtype=float)
    y = np.asarray(y.config if isinstance(y, PreShape) else y, dtype=float)
    if x.shape != y.shape:
        raise InvalidInput(f"shape mismatch {x.shape} vs {y.shape}")
    return x, y


def _residual_from(x, y, t):
    # 1 - t^2 = (1 - |t|)(1 + |t|) and 1 - |t| = |x - sign(t) y|^2 / 2 for unit x, y
    s = 1.0 if t >= 0 else -1.0
    gap = 0.5 * float(np.sum((x - s * y) ** 2))
    return math.sqrt(max(gap * (1.0 + abs(t)), 0.0))


def residual_distance(x, y) -> float:
    """sqrt(1 - tr(x^T y)^2); zero between x and -x."""
    x, y = _check_pair(x, y)
    return _residual_from(x, y, float(np.sum(x * y)))


def _optimal_rotations(mats: np.ndarray):
    """Rotations g in SO(m) maximizing |tr(g A)| for each A = y x^T in ``mats``."""
    u, s, vt = np.linalg.svd(mats)
    v = np.swapaxes(vt, -1, -2)
    ut = np.swapaxes(u, -1, -2)
    g = v @ ut
    t = s.sum(axis=-1)
    det = np.linalg.det(g)
    bad = det < 0
    if np.any(bad):
        m = mats.shape[-1]
        if m % 2 == 1:
            # -V U^T lies in SO(m) for odd m and attains |tr| = sum of singular values
            g[bad] = -g[bad]
            t[bad] = -t[bad]
        else:
            fix = np.ones(m)
            fix[-1] = -1.0
            g[bad] = (v[bad] * fix) @ ut[bad]
            t[bad] = t[bad] - 2.0 * s[bad, -1]
    return g, t


def procrustes_distance(x, y) -> tuple[float, np.ndarray]:
    """min over g in SO(m) of d_R(x, g y), and the minimizing rotation."""
    x, y = _check_pair(x, y)
    g, t = _optimal_rotations((y @ x.T)[None])
    g, t = g[0], float(t[0])
    return _residual_from(x, g @ y, t), g


def align(target: np.ndarray, configs: np.ndarray) -> np.ndarray:
    """Rotate (and sign-flip) every config into optimal position to ``target``.

    Afterwards ``tr(target^T aligned_i) >= 0`` for every ``i``.
    """
    target = np.asarray(target, dtype=float)
    g, t = _optimal_rotations(configs @ target.T)
    aligned = g @ configs
    sign = np.where(t < 0, -1.0, 1.0)
    return aligned * sign[:, None, None]


# ----------------------------------------------------------------------------
# Eigenstructure and means


@dataclass(frozen=True)
class EigenStructure:
    """Descending eigenpairs of a second-moment matrix of unit vectors."""

    lambdas: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        vecs = np.asarray(self.vectors, dtype=float)
        if vecs.shape != (lam.size, lam.size):
            raise InvalidInput("need one eigenvector column per eigenvalue")
        if np.any(np.diff(lam) > 1e-15):
            raise InvalidInput("eigenvalues must be in descending order")
        if np.any(lam < -1e-12):
            raise InvalidInput("second-moment eigenvalues must be nonnegative")
        if abs(lam.sum() - 1.0) > 1e-9:
            raise InvalidInput("second moment of unit vectors must have trace 1")
        if np.max(np.abs(vecs.T @ vecs - np.eye(lam.size))) > 1e-9:
            raise InvalidInput("eigenvectors must be orthonormal")
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "vectors", vecs)

    @classmethod
    def from_matrix(cls, second_moment) -> "EigenStructure":
        mat = np.asarray(second_moment, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InvalidInput("second moment must be a square matrix")
        if np.max(np.abs(mat - mat.T)) > 1e-9:
            raise InvalidInput("second moment must be symmetric")
        lam, vecs = np.linalg.eigh(0.5 * (mat + mat.T))
        lam, vecs = lam[::-1], vecs[:, ::-1]
        v1 = vecs[:, 0]
        nz = np.flatnonzero(np.abs(v1) > 1e-15)
        if nz.size and v1[nz[0]] < 0:
            vecs = vecs.copy()
            vecs[:, 0] = -v1
        return cls(lam, vecs)

    @classmethod
    def from_sample(cls, configs, weights=None) -> "EigenStructure":
        rows = vec_rows(as_configs(configs))
        w = _weights(rows.shape[0], weights)
        return cls.from_matrix((rows * w[:, None]).T @ rows)

    @property
    def eigengap(self) -> float:
        return float(self.lambdas[0] - self.lambdas[1])

    def matrix(self) -> np.ndarray:
        return (self.vectors * self.lambdas) @ self.vectors.T


def residual_mean(sample, weights=None) -> MeanSet:
    """Leading eigenvector of the second moment of ``vec(X_i)``."""
    configs = as_configs(sample)
    m = configs.shape[1]
    eig = EigenStructure.from_sample(configs, weights)
    value = float(1.0 - eig.lambdas[0])
    info = {"eigengap": eig.eigengap, "eigen": eig}
    if eig.eigengap > EIGENGAP_TOL:
        mean = canonical_sign(unvec(eig.vectors[:, 0], m))
        return MeanSet([mean], value, 0.0, info=info)
    # every unit vector of the top eigenspace minimizes; report an orthonormal basis
    top = np.flatnonzero(eig.lambdas[0] - eig.lambdas <= EIGENGAP_TOL)
    basis = [canonical_sign(unvec(eig.vectors[:, j], m)) for j in top]
    return MeanSet(basis, value, 1.0, unique=False, info=info)


def procrustes_frechet_value(sample, x, weights=None) -> float:
    configs = as_configs(sample)
    w = _weights(configs.shape[0], weights)
    _, t = _optimal_rotations(configs @ np.asarray(x, dtype=float).T)
    return float(w @ (1.0 - t * t))


def procrustes_mean(sample, tol: float = 1e-10, max_iter: int = 1000, weights=None) -> MeanSet:
    """Generalized Procrustes iteration started at the first atom.

    Aligns all atoms to the current mean, replaces the mean by the residual
    mean of the aligned atoms, and stops when successive means are within
    ``tol`` in Procrustes distance.  ``info["aligned"]`` holds the aligned
    lift of the sample, signed to lie in the mean's hemisphere.
    """
    configs = as_configs(sample)
    w = _weights(configs.shape[0], weights)
    mean = configs[0]
    for it in range(1, max_iter + 1):
        aligned = align(mean, configs)
        new = residual_mean(aligned, w).select()
        step, _ = procrustes_distance(mean, new)
        mean = new
        if step < tol:
            aligned = align(mean, configs)
            eig = EigenStructure.from_sample(aligned, w)
            value = float(1.0 - eig.lambdas[0])
            return MeanSet([mean], value, 0.0,
                           info={"aligned": aligned, "iterations": it, "eigen": eig,
                                 "converged": True})
    raise MaxIterations(f"no convergence within {max_iter} iterations", last_iterate=mean)


# ----------------------------------------------------------------------------
# CLT covariance


def hessian_pinv(eigen: EigenStructure) -> np.ndarray:
    """(1/2) sum_{j >= 2} (lambda_1 - lambda_j)^{-1} v_j v_j^T."""
    if eigen.eigengap <= DEGENERATE_TOL:
        raise DegenerateEigengap("lambda_1 = lambda_2; the residual mean is not unique")
    lam, vecs = eigen.lambdas, eigen.vectors
    coef = 0.5 / (lam[0] - lam[1:])
    return (vecs[:, 1:] * coef) @ vecs[:, 1:].T


def clt_cov_procrustes(eigen: EigenStructure) -> np.ndarray:
    """H^- D H^- with D the second moment and H^- the Hessian pseudo-inverse."""
    h = hessian_pinv(eigen)
    return h @ eigen.matrix() @ h


def clt_cov_procrustes_sandwich(aligned, weights=None, eigen: EigenStructure | None = None):
    """H^- Cov(g) H^- with g = 2 (X^T v_1) P X the per-atom gradient in the chart.

    ``P`` projects onto the orthogonal complement of ``v_1``.  For concentrated
    data ``Cov(g)`` is close to ``4 D`` on that complement.
    """
    rows = vec_rows(as_configs(aligned))
    w = _weights(rows.shape[0], weights)
    if eigen is None:
        eigen = EigenStructure.from_matrix((rows * w[:, None]).T @ rows)
    h = hessian_pinv(eigen)
    v1 = eigen.vectors[:, 0]
    proj = rows - np.outer(rows @ v1, v1)
    grad = 2.0 * (rows @ v1)[:, None] * proj
    middle = (grad * w[:, None]).T @ grad
    return h @ middle @ h


def chart(x, xi) -> np.ndarray:
    """phi_xi(x) = (x - tr(x^T xi) xi) / tr(x^T xi), defined when tr(x^T xi) > 0."""
    x, xi = _check_pair(x, xi)
    t = float(np.sum(x * xi))
    if t <= 0:
        raise OutOfDomain("chart is defined only on the open hemisphere around xi")
    return (x - t * xi) / t
