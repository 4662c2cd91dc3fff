"""Discrete 2-Wasserstein distance, barycenters, and the interpolation region."""
import itertools
import json
import math

import numpy as np
import pytest
from scipy.optimize import linprog

from frechet_lab import _simplex
from frechet_lab import wasserstein as W
from frechet_lab.errors import Empty, InvalidInput, TooLarge

PTS = W.example_points()
A, B, E, F = PTS["A"], PTS["B"], PTS["E"], PTS["F"]
MU, NU = W.symmetric_pair(A), W.symmetric_pair(B)


def random_measure(rng, k, dim=2):
    return W.DiscreteMeasure(rng.standard_normal((k, dim)), rng.dirichlet(np.ones(k)))


def grid_checked(gamma, beta, data):
    """(agree, inside_band) for one grid point of the (gamma, beta) plane."""
    try:
        region = W.feasible_region(gamma)
    except Empty:
        expected, dist = False, math.inf
    else:
        expected = region.contains(beta)
        dist = min(abs(beta - region.beta_lo), abs(beta - region.beta_hi))
    got = W.interpolation_feasible(beta - gamma, beta, data)
    return got == expected, dist < 1e-9


# ----------------------------------------------------------------------------
# Measures


def test_measure_validation():
    with pytest.raises(InvalidInput):
        W.DiscreteMeasure([[0.0], [1.0]], [0.5, 0.6])
    with pytest.raises(InvalidInput):
        W.DiscreteMeasure([[0.0], [0.0]], [0.5, 0.5])
    with pytest.raises(InvalidInput):
        W.DiscreteMeasure([[0.0], [1.0]], [1.2, -0.2])


def test_from_atoms_merges_and_drops():
    mu = W.DiscreteMeasure.from_atoms([[0.0, 0.0], [1e-12, 0.0], [1.0, 1.0], [2.0, 2.0]],
                                      [0.25, 0.25, 0.5, 0.0])
    assert len(mu) == 2
    assert np.allclose(sorted(mu.weights), [0.5, 0.5])


def test_json_roundtrip():
    mu = W.DiscreteMeasure([[0.1, 0.2], [1.0 / 3.0, -2.0]], [0.3, 0.7])
    back = W.DiscreteMeasure.from_json(mu.to_json())
    assert back.canonical_key() == mu.canonical_key()
    assert json.loads(mu.to_json()).keys() == {"support", "weights"}


# ----------------------------------------------------------------------------
# Distance


def test_w2_symmetric_pairs():
    value, plan = W.w2_squared(W.symmetric_pair(E), MU)
    assert value == pytest.approx(0.5, abs=1e-12)
    # E -> A and -E -> -A carry all the mass
    assert np.allclose(plan.matrix, [[0.5, 0.0], [0.0, 0.5]], atol=1e-12)
    assert W.w2_squared(W.symmetric_pair(E), W.symmetric_pair(F))[0] == pytest.approx(1.0, abs=1e-12)
    assert W.w2_squared(MU, NU)[0] == pytest.approx(2.0, abs=1e-12)


def test_w2_identical_is_zero():
    rng = np.random.default_rng(0)
    mu = random_measure(rng, 5)
    assert W.w2_distance(mu, mu)[0] == pytest.approx(0.0, abs=1e-7)


def test_w2_metric_axioms():
    rng = np.random.default_rng(1)
    for _ in range(40):
        a, b, c = (random_measure(rng, int(rng.integers(1, 7))) for _ in range(3))
        dab = W.w2_distance(a, b)[0]
        assert dab == W.w2_distance(b, a)[0]
        assert dab <= W.w2_distance(a, c)[0] + W.w2_distance(c, b)[0] + 1e-8


def test_plans_feasible_and_cost_consistent():
    rng = np.random.default_rng(2)
    for _ in range(40):
        a, b = random_measure(rng, int(rng.integers(1, 7))), random_measure(rng, int(rng.integers(1, 7)))
        value, plan = W.w2_squared(a, b)
        assert plan.check(a, b, tol=1e-10)
        assert plan.cost(a, b) == pytest.approx(value, abs=1e-10)


def test_uniform_3x3_matches_permutations():
    rng = np.random.default_rng(3)
    for _ in range(30):
        x, y = rng.standard_normal((3, 2)), rng.standard_normal((3, 2))
        cost = W.sq_cost(x, y)
        best = min(sum(cost[i, p[i]] for i in range(3)) / 3 for p in itertools.permutations(range(3)))
        value, _ = W.w2_squared(W.DiscreteMeasure.uniform(x), W.DiscreteMeasure.uniform(y))
        assert value == pytest.approx(best, abs=1e-10)


def test_simplex_matches_scipy_linprog():
    rng = np.random.default_rng(4)
    for _ in range(30):
        a, b = random_measure(rng, int(rng.integers(2, 8))), random_measure(rng, int(rng.integers(2, 8)))
        cost = W.sq_cost(a.support, b.support)
        c, a_eq, b_eq = W._transport_lp(a.weights, b.weights, cost)
        ref = linprog(c, A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
        assert W.w2_squared(a, b)[0] == pytest.approx(ref.fun, abs=1e-10)


def test_simplex_detects_infeasibility():
    with pytest.raises(InvalidInput):
        _simplex.solve([1.0, 1.0], [[1.0, 1.0], [1.0, 1.0]], [1.0, 2.0])


def test_size_limits():
    big = W.DiscreteMeasure.uniform(np.arange(40.0)[:, None])
    with pytest.raises(TooLarge):
        W.w2_distance(big, big)
    with pytest.raises(InvalidInput):
        W.w2_distance(W.DiscreteMeasure.uniform([[0.0]]), W.DiscreteMeasure.uniform([[0.0, 1.0]]))


# ----------------------------------------------------------------------------
# Barycenters


def test_barycenter_single_measure_is_itself():
    rng = np.random.default_rng(5)
    mu = random_measure(rng, 4)
    ms = W.barycenter_multimarginal([mu])
    assert ms.frechet_value == pytest.approx(0.0, abs=1e-12)
    assert len(ms.minimizers) == 1
    assert W.w2_distance(ms.minimizers[0], mu)[0] < 1e-7


def test_barycenter_of_identical_measures():
    mu = W.DiscreteMeasure([[0.0, 0.0], [1.0, 2.0], [3.0, -1.0]], [0.2, 0.3, 0.5])
    ms = W.barycenter_multimarginal([mu, mu])
    assert ms.frechet_value == pytest.approx(0.0, abs=1e-12)
    assert all(W.w2_distance(b, mu)[0] < 1e-7 for b in ms.minimizers)


def test_barycenter_nonunique_example():
    ms = W.barycenter_multimarginal([MU, NU], [0.5, 0.5])
    assert ms.frechet_value == pytest.approx(0.5, abs=1e-12)
    keys = {b.canonical_key() for b in ms.minimizers}
    assert W.symmetric_pair(E).canonical_key() in keys
    assert W.symmetric_pair(F).canonical_key() in keys
    assert ms.diameter == pytest.approx(1.0, abs=1e-12)
    assert not ms.unique
    for bary in ms.minimizers:
        assert W.frechet_functional_w([MU, NU], [0.5, 0.5], bary) >= ms.frechet_value - 1e-9


def test_barycenter_two_point_masses():
    mu = W.DiscreteMeasure([[0.0, 0.0]], [1.0])
    nu = W.DiscreteMeasure([[2.0, 0.0]], [1.0])
    ms = W.barycenter_multimarginal([mu, nu], [0.25, 0.75])
    assert np.allclose(ms.minimizers[0].support, [[1.5, 0.0]])
    assert ms.frechet_value == pytest.approx(0.25 * 1.5**2 + 0.75 * 0.5**2)


def test_barycenter_limits():
    mu = W.DiscreteMeasure.uniform([[0.0]])
    with pytest.raises(TooLarge):
        W.barycenter_multimarginal([mu] * 5)
    with pytest.raises(TooLarge):
        W.barycenter_multimarginal([W.DiscreteMeasure.uniform(np.arange(9.0)[:, None])])
    with pytest.raises(InvalidInput):
        W.barycenter_multimarginal([])


@pytest.mark.parametrize("candidate, expected", [(E, 0.5), (F, 0.5), (A, 1.0)])
def test_frechet_functional_examples(candidate, expected):
    value = W.frechet_functional_w([MU, NU], [0.5, 0.5], W.symmetric_pair(candidate))
    assert value == pytest.approx(expected, abs=1e-12)


# ----------------------------------------------------------------------------
# Interpolation region


def test_interpolation_examples():
    data = W.interpolation_data(E, A)
    assert W.interpolation_feasible(0.0, 2.0, data)
    assert not W.interpolation_feasible(0.1, 2.1, data)
    swapped = W.interpolation_data(E, A, swapped=True)
    for alpha, beta in [(0.0, 0.5), (0.0, 2.0), (0.0, 50.0), (0.3, 4.0), (1.0, 10.0)]:
        assert not W.interpolation_feasible(alpha, beta, swapped)


def test_interpolation_rejects_bad_parameters():
    with pytest.raises(InvalidInput):
        W.interpolation_feasible(1.0, 1.0, [])
    with pytest.raises(InvalidInput):
        W.interpolation_feasible(0.0, -1.0, [])


@pytest.mark.parametrize("gamma, lo, hi", [(2.0, 2.0, 2.0), (2.5, 1.5, 3.0)])
def test_feasible_region_closed_form(gamma, lo, hi):
    region = W.feasible_region(gamma)
    assert region.beta_lo == pytest.approx(lo, abs=1e-15)
    assert region.beta_hi == pytest.approx(hi, abs=1e-15)


def test_feasible_region_empty_below_two():
    with pytest.raises(Empty):
        W.feasible_region(1.99)


def test_region_agrees_with_checker_on_grid():
    data = W.interpolation_data(E, A)
    mismatches = 0
    for gamma in np.linspace(0.5, 6.0, 50):
        for beta in np.linspace(0.1, 6.0, 50):
            agree, band = grid_checked(gamma, beta, data)
            mismatches += not agree and not band
    assert mismatches == 0
