"""Fréchet values, mean-set selection, and the seeded Monte Carlo harness."""
import math

import numpy as np
import pytest

from frechet_lab import circle, core
from frechet_lab.core import EmpiricalMeasure, RhoFunction, RiskReport, Sampler
from frechet_lab.errors import DegenerateRegression, EstimatorError, InvalidInput
from frechet_lab.spaces import circle_space

PI = math.pi
SPACE = circle_space()


def normal_sampler(scale):
    return Sampler("normal", SPACE, lambda rng, n: circle.wrap(scale * rng.standard_normal(n)))


def dirac_sampler(x):
    return Sampler("dirac", SPACE, lambda rng, n: np.full(n, x))


@pytest.mark.parametrize("atoms, x, expected", [
    ([0.0], 0.0, 0.0),
    ([-PI / 2, PI / 2], 0.0, PI**2 / 4),
    ([PI - 0.1, -PI + 0.1], 0.0, (PI - 0.1) ** 2),
])
def test_frechet_value_examples(atoms, x, expected):
    rho = RhoFunction.squared_distance(SPACE)
    mu = EmpiricalMeasure.uniform(atoms)
    assert core.frechet_value(SPACE, rho, mu, x) == pytest.approx(expected, rel=1e-14)


def test_empirical_measure_validation():
    with pytest.raises(InvalidInput):
        EmpiricalMeasure([0.0, 1.0], np.array([0.5, 0.6]))
    with pytest.raises(InvalidInput):
        EmpiricalMeasure([], np.array([]))


def test_select_is_lexicographic():
    ms = core.MeanSet([0.5, -PI, 0.0], 1.0, PI)
    assert ms.select() == -PI
    assert not ms.unique
    with pytest.raises(InvalidInput):
        core.MeanSet(core.WHOLE_SPACE, 1.0, 2.0).select()


def test_unique_flag_threshold():
    assert core.MeanSet([0.0], 0.0, 0.0).unique
    assert core.MeanSet([0.0, 1e-7], 0.0, 1e-7).unique
    assert not core.MeanSet([0.0, 1e-5], 0.0, 1e-5).unique


def test_rep_rng_streams_are_distinct_and_reproducible():
    a = core.rep_rng(7, 0).random(5)
    b = core.rep_rng(7, 1).random(5)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, core.rep_rng(7, 0).random(5))
    assert core.derived_seed(7, 0) != core.derived_seed(7, 1)
    assert core.derived_seed(7, 3) == core.derived_seed(7, 3)


def test_constant_truth_estimator_has_zero_risk():
    rep = core.risk(lambda s: 0.0, normal_sampler(0.1), 0.0, 50, 2.0, 20, seed=1)
    assert rep.estimate == 0.0 and rep.std_error == 0.0


def test_dirac_sampler_zero_risk():
    rep = core.risk(SPACE.estimator(), dirac_sampler(1.0), 1.0, 30, 2.0, 10, seed=2)
    assert rep.estimate == 0.0


def test_normal_risk_matches_classical_variance():
    n = 100
    rep = core.risk(SPACE.estimator(), normal_sampler(1e-3), 0.0, n, 2.0, 2000, seed=3)
    # E[mean^2] = scale^2 / n for the Euclidean sample mean
    expected = 1e-6 / n
    assert abs(rep.estimate - expected) < 3 * rep.std_error


@pytest.mark.parametrize("threads", [2, 4])
def test_risk_independent_of_threads(threads):
    sampler = circle.power_smeary_density(1.0)
    s = Sampler("pow", SPACE, lambda rng, n: sampler.sample(n, rng))
    one = core.risk(SPACE.estimator(), s, 0.0, 200, 2.0, 40, seed=9, threads=1)
    many = core.risk(SPACE.estimator(), s, 0.0, 200, 2.0, 40, seed=9, threads=threads)
    assert one == many


def test_estimator_error_carries_replication():
    def flaky(sample):
        if sample[0] > 0:
            raise ValueError("boom")
        return 0.0

    with pytest.raises(EstimatorError) as info:
        core.risk(flaky, normal_sampler(1.0), 0.0, 5, 2.0, 50, seed=4)
    assert info.value.replication >= 0
    assert isinstance(info.value.cause, ValueError)


def test_risk_validates_arguments():
    with pytest.raises(InvalidInput):
        core.risk(lambda s: 0.0, normal_sampler(1.0), 0.0, 5, 0.5, 10, seed=0)
    with pytest.raises(InvalidInput):
        core.risk(lambda s: 0.0, normal_sampler(1.0), 0.0, 5, 2.0, 1, seed=0)


def test_modulation_near_one_for_euclidean_like_data():
    sampler = Sampler("box", SPACE, lambda rng, n: rng.uniform(-0.1, 0.1, n))
    curve = core.variance_modulation(SPACE, sampler, 0.0, 0.01 / 3.0, [10, 100, 1000], 400, seed=5)
    for (n, m_n), rep in zip(curve.entries, curve.reports):
        assert abs(m_n - 1.0) < 3 * n * rep.std_error / curve.denominator + 1e-12


def test_modulation_zero_for_dirac():
    curve = core.variance_modulation(SPACE, dirac_sampler(0.0), 0.0, 1.0, [10, 20], 5, seed=5)
    assert all(m == 0.0 for _, m in curve.entries)


def test_modulation_grows_for_power_smeary():
    dens = circle.power_smeary_density(1.0)
    sampler = Sampler("pow", SPACE, lambda rng, n: dens.sample(n, rng))
    curve = core.variance_modulation(SPACE, sampler, 0.0, dens.second_moment(),
                                     [100, 1000, 10_000], 200, seed=6)
    values = [m for _, m in curve.entries]
    assert values[0] < values[1] < values[2]


def test_modulation_rejects_bad_grid():
    with pytest.raises(InvalidInput):
        core.variance_modulation(SPACE, dirac_sampler(0.0), 0.0, 1.0, [20, 10], 5, seed=0)


def test_fit_rate_exact_power_law():
    reports = [RiskReport(n, 1.0, 3.0 * n ** -0.25, 0.0, 10) for n in (10, 100, 1000, 10_000)]
    slope, se = core.fit_rate(reports)
    assert slope == pytest.approx(-0.25, abs=1e-12)
    assert se == pytest.approx(0.0, abs=1e-10)


def test_fit_rate_degenerate():
    reports = [RiskReport(n, 1.0, 0.0, 0.0, 10) for n in (10, 100, 1000)]
    with pytest.raises(DegenerateRegression):
        core.fit_rate(reports)
    with pytest.raises(DegenerateRegression):
        core.rate_estimate(dirac_sampler(0.0), 0.0, [10, 100, 1000], 4, seed=0)


def test_rate_parametric_for_concentrated_sampler():
    slope, se = core.rate_estimate(normal_sampler(0.05), 0.0, [100, 1000, 10_000], 300, seed=8)
    assert slope == pytest.approx(-0.5, abs=0.05)
