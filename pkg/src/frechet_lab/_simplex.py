"""Dense two-phase tableau simplex for small equality-form LPs.

Solves ``min c^T x  s.t.  A x = b, x >= 0``.  Dantzig pricing, switching to
Bland's rule after a run of degenerate pivots.  Redundant equality rows are
dropped after phase one, which transportation problems always have.  The
final tableau supports enumerating alternative optimal bases.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput

TOL = 1e-10
DEGENERATE_RUN = 50


@dataclass
class Tableau:
    rows: np.ndarray        # constraint rows [B^{-1} A | B^{-1} b]
    reduced: np.ndarray     # reduced costs, last entry = -objective
    basis: list

    def copy(self) -> "Tableau":
        return Tableau(self.rows.copy(), self.reduced.copy(), list(self.basis))

    def pivot(self, r: int, j: int) -> None:
        self.rows[r] /= self.rows[r, j]
        col = self.rows[:, j].copy()
        col[r] = 0.0
        self.rows -= np.outer(col, self.rows[r])
        self.reduced -= self.reduced[j] * self.rows[r]
        self.basis[r] = j

    def solution(self, nvar: int) -> np.ndarray:
        x = np.zeros(nvar)
        for r, j in enumerate(self.basis):
            if j < nvar:
                x[j] = self.rows[r, -1]
        return np.maximum(x, 0.0)

    @property
    def objective(self) -> float:
        return float(-self.reduced[-1])


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    value: float
    tableau: Tableau
    nvar: int


def _ratio_rows(tab: Tableau, j: int) -> list[int]:
    """Rows attaining the minimum ratio for entering column ``j``."""
    col = tab.rows[:, j]
    ok = col > TOL
    if not np.any(ok):
        return []
    ratios = np.full(col.shape, np.inf)
    ratios[ok] = tab.rows[ok, -1] / col[ok]
    best = ratios.min()
    return [int(i) for i in np.flatnonzero(ratios <= best + TOL)]


def _optimize(tab: Tableau, allowed: np.ndarray, max_pivots: int) -> None:
    degenerate = 0
    for _ in range(max_pivots):
        red = np.where(allowed, tab.reduced[:-1], 0.0)
        if degenerate >= DEGENERATE_RUN:
            cand = np.flatnonzero(red < -TOL)
            if cand.size == 0:
                return
            j = int(cand[0])
        else:
            j = int(np.argmin(red))
            if red[j] >= -TOL:
                return
        rows = _ratio_rows(tab, j)
        if not rows:
            raise InvalidInput("linear program is unbounded")
        # Bland-style tie break on the leaving variable
        r = min(rows, key=lambda i: tab.basis[i])
        degenerate = degenerate + 1 if tab.rows[r, -1] <= TOL else 0
        tab.pivot(r, j)
    raise InvalidInput("simplex pivot limit reached")


def solve(c, a_eq, b_eq, max_pivots: int = 100_000) -> LPResult:
    c = np.asarray(c, dtype=float)
    a = np.asarray(a_eq, dtype=float)
    b = np.asarray(b_eq, dtype=float)
    neg = b < 0
    a[neg] *= -1.0
    b = np.where(neg, -b, b)
    m, nvar = a.shape

    # phase one: artificial basis
    rows = np.hstack([a, np.eye(m), b[:, None]])
    reduced = np.concatenate([-a.sum(axis=0), np.zeros(m), [-b.sum()]])
    tab = Tableau(rows, reduced, list(range(nvar, nvar + m)))
    allowed = np.ones(nvar + m, dtype=bool)
    _optimize(tab, allowed, max_pivots)
    if tab.objective > 1e-9 * max(1.0, float(b.sum())):
        raise InvalidInput("linear program is infeasible")

    # drive artificials out of the basis; rows where that fails are redundant
    keep = []
    for r in range(m):
        if tab.basis[r] >= nvar:
            cols = np.flatnonzero(np.abs(tab.rows[r, :nvar]) > 1e-9)
            if cols.size == 0:
                continue
            tab.pivot(r, int(cols[0]))
        keep.append(r)
    rows = np.hstack([tab.rows[keep, :nvar], tab.rows[keep, -1:]])
    basis = [tab.basis[r] for r in keep]

    # phase two
    reduced = np.concatenate([c, [0.0]])
    for r, j in enumerate(basis):
        reduced -= reduced[j] * rows[r]
    tab = Tableau(rows, reduced, basis)
    _optimize(tab, np.ones(nvar, dtype=bool), max_pivots)
    return LPResult(tab.solution(nvar), tab.objective, tab, nvar)


def optimal_vertices(result: LPResult, cap: int = 16, tol: float = 1e-9) -> list[np.ndarray]:
    """Distinct vertex solutions reachable by pivots that keep optimality.

    Breadth-first search over bases joined by pivots on zero-reduced-cost
    columns; at most ``cap`` bases are visited.
    """
    start = result.tableau.copy()
    seen = {frozenset(start.basis)}
    queue = deque([start])
    vertices: list[np.ndarray] = []
    visited = 0
    while queue and visited < cap:
        tab = queue.popleft()
        visited += 1
        x = tab.solution(result.nvar)
        if not any(np.max(np.abs(x - v)) <= tol for v in vertices):
            vertices.append(x)
        basic = set(tab.basis)
        for j in np.flatnonzero(np.abs(tab.reduced[:-1]) <= tol):
            if j in basic:
                continue
            for r in _ratio_rows(tab, int(j)):
                key = frozenset(set(tab.basis) - {tab.basis[r]} | {int(j)})
                if key in seen:
                    continue
                seen.add(key)
                nxt = tab.copy()
                nxt.pivot(r, int(j))
                queue.append(nxt)
    return vertices
