"""Circle: arc distance, exact intrinsic means, example densities, CLT statistics.

Frozen constants below were computed symbolically (sympy, exact rationals
and pi) outside the package and pasted in with 17 significant digits.
"""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frechet_lab import circle
from frechet_lab.errors import InvalidInput, OutOfDomain, OutOfRegime

PI = math.pi

# E[X^2] of the power-smeary laws, closed form via symbolic integration
POWER_R1_SECOND_MOMENT = 1.3340592387192212   # pi/2 - 1/4 + 1/(24 pi)
POWER_R2_SECOND_MOMENT = 1.7024858713186014   # (120 pi^2 - 75 pi + 14) / (180 pi)
# c_r = 1 - 1/(2 pi) + exp(-2^r)/pi
LOG_C1 = 0.88392361551180192
LOG_C2 = 0.84667510583816105
# 1/2 uniform(circle) + 1/2 uniform[-1/2, 1/2]: pi^2/6 + 1/24
MIXTURE_HALF_SECOND_MOMENT = 1.6866007335148931


def mixed_sample(rng, n):
    """Continuous atoms plus exact duplicates, antipodal pairs and near-pi atoms."""
    x = rng.uniform(-PI, PI, n)
    kind = rng.integers(0, 4)
    if kind == 1 and n > 2:
        x[: n // 2] = x[0]
    elif kind == 2 and n > 1:
        x[1] = circle.antipode(x[0])
    elif kind == 3:
        x[: max(1, n // 3)] = PI - rng.uniform(0, 1e-3, max(1, n // 3))
    return x


@pytest.mark.parametrize("x, y, expected", [
    (0.1, -0.2, 0.3),
    (PI - 0.1, -PI + 0.1, 0.2),
    (0.0, -PI, PI),
    (PI, -PI, 0.0),
])
def test_arc_distance_examples(x, y, expected):
    assert circle.arc_distance(x, y) == pytest.approx(expected, abs=1e-15)


def test_wrap_canonical_range():
    angles = np.array([-PI, PI, 3 * PI, -3 * PI, 7.0, -1e-17 - PI])
    w = circle.wrap(angles)
    assert np.all(w >= -PI) and np.all(w < PI)
    assert circle.wrap(PI) == -PI


def test_circle_point_wraps():
    assert circle.CirclePoint(PI).angle == -PI
    assert circle.CirclePoint(2 * PI + 0.5).angle == pytest.approx(0.5, abs=1e-15)
    with pytest.raises(InvalidInput):
        circle.CirclePoint(float("nan"))


def test_frechet_function_examples():
    assert circle.frechet_function([0.0], 0.0) == 0.0
    assert circle.frechet_function([-PI / 2, PI / 2], 0.0) == pytest.approx(PI**2 / 4)
    assert circle.frechet_function([PI - 0.1, -PI + 0.1], 0.0) == pytest.approx((PI - 0.1) ** 2)


def test_exact_three_atoms_in_half_circle():
    ms = circle.intrinsic_mean_exact([-PI / 2, 0.0, PI / 2])
    assert ms.unique
    assert ms.minimizers[0] == pytest.approx(0.0, abs=1e-15)


def test_exact_wraparound_pair():
    ms = circle.intrinsic_mean_exact([PI - 0.1, -PI + 0.1])
    assert ms.unique
    assert ms.minimizers[0] == -PI
    assert ms.frechet_value == pytest.approx(0.01, abs=1e-14)


@pytest.mark.parametrize("x", [-PI, -1.0, 0.0, 2.5])
def test_exact_singleton_is_honest(x):
    ms = circle.intrinsic_mean_exact([x])
    assert ms.minimizers == [x]
    assert ms.frechet_value == 0.0


def test_exact_opposite_pair_has_two_means():
    ms = circle.intrinsic_mean_exact([-PI / 2, PI / 2])
    assert sorted(ms.minimizers) == pytest.approx([-PI, 0.0], abs=1e-15)
    assert ms.diameter == pytest.approx(PI)
    assert not ms.unique


def test_exact_uniform_grid_is_whole_set():
    atoms = np.linspace(-PI, PI, 6, endpoint=False)
    ms = circle.intrinsic_mean_exact(atoms)
    # F is constant on 6 equally spaced minima, one per arc between antipodes
    assert len(ms.minimizers) == 6


def test_brute_force_examples():
    ms = circle.brute_force_mean([0.3])
    assert ms.minimizers[0] == pytest.approx(0.3, abs=1e-8)
    ms = circle.brute_force_mean([-PI / 2, PI / 2])
    assert sorted(ms.minimizers) == pytest.approx([-PI, 0.0], abs=1e-7)
    with pytest.raises(InvalidInput):
        circle.brute_force_mean([0.0], grid_size=10)


def test_exact_matches_oracle_on_random_samples():
    rng = np.random.default_rng(11)
    for _ in range(60):
        n = int(rng.integers(1, 51))
        atoms = mixed_sample(rng, n)
        exact = circle.intrinsic_mean_exact(atoms)
        oracle = circle.brute_force_mean(atoms)
        assert exact.frechet_value == pytest.approx(oracle.frechet_value, abs=1e-8)
        for m in oracle.minimizers:
            assert min(circle.arc_distance(m, e) for e in exact.minimizers) < 1e-5


def test_exact_weighted_matches_oracle():
    rng = np.random.default_rng(3)
    for _ in range(10):
        atoms = rng.uniform(-PI, PI, 12)
        w = rng.uniform(0.1, 1.0, 12)
        exact = circle.intrinsic_mean_exact(atoms, w)
        oracle = circle.brute_force_mean(atoms, weights=w)
        assert exact.frechet_value == pytest.approx(oracle.frechet_value, abs=1e-8)


def test_frechet_value_consistent_with_minimizers():
    rng = np.random.default_rng(5)
    atoms = rng.uniform(-PI, PI, 30)
    ms = circle.intrinsic_mean_exact(atoms)
    for m in ms.minimizers:
        assert circle.frechet_function(atoms, m) == pytest.approx(ms.frechet_value, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(1, 40),
       theta=st.floats(-10.0, 10.0, allow_nan=False))
def test_exact_is_rotation_equivariant(seed, n, theta):
    atoms = np.random.default_rng(seed).uniform(-PI, PI, n)
    base = circle.intrinsic_mean_exact(atoms)
    rotated = circle.intrinsic_mean_exact(circle.wrap(atoms + theta))
    assert rotated.frechet_value == pytest.approx(base.frechet_value, abs=1e-9)
    assert len(rotated.minimizers) == len(base.minimizers)
    for m in base.minimizers:
        target = circle.wrap(m + theta)
        assert min(circle.arc_distance(target, r) for r in rotated.minimizers) < 1e-9


# ----------------------------------------------------------------------------
# Densities


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0, 4.0])
def test_power_density_normalized(r):
    dens = circle.power_smeary_density(r)
    assert dens.total_mass() == pytest.approx(1.0, abs=1e-6)
    # mid-level times length 1 plus the two tails 2 r / (2 pi (r + 1)) telescopes to 1
    assert dens.extra["mid"] + r / (PI * (r + 1)) == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("r, expected", [(1.0, POWER_R1_SECOND_MOMENT), (2.0, POWER_R2_SECOND_MOMENT)])
def test_power_second_moment(r, expected):
    assert circle.power_smeary_density(r).second_moment() == pytest.approx(expected, rel=1e-12)


def test_mixture_second_moment_and_antipode():
    dens = circle.uniform_mixture_density(0.5)
    assert dens.total_mass() == pytest.approx(1.0, abs=1e-12)
    assert dens.second_moment() == pytest.approx(MIXTURE_HALF_SECOND_MOMENT, rel=1e-12)
    assert dens.antipode_density() == pytest.approx(1 / (4 * PI), abs=1e-15)


@pytest.mark.parametrize("r, expected", [(1.0, LOG_C1), (2.0, LOG_C2)])
def test_log_constant(r, expected):
    assert circle.log_smeary_constant(r) == pytest.approx(expected, abs=1e-12)
    assert circle.log_smeary_density(r).total_mass() == pytest.approx(1.0, abs=1e-6)


@pytest.mark.parametrize("dens", [
    circle.power_smeary_density(1.0), circle.power_smeary_density(2.0),
    circle.log_smeary_density(1.0), circle.uniform_mixture_density(0.5),
], ids=["pow1", "pow2", "log1", "mix"])
def test_antipodal_density_bounded(dens):
    assert dens.antipode_density() <= 1 / (2 * PI) + 1e-9


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_power_sampler_support_and_mass(r):
    n = 200_000
    x = circle.sample_power_smeary(r, n, 17)
    inside = (np.abs(x) <= 0.5) | (x >= PI - 1) | (x <= -PI + 1)
    assert inside.all()
    assert np.all((x >= -PI) & (x < PI))
    p_mid = ((PI - 1) * r + PI) / (PI * r + PI)
    se = math.sqrt(p_mid * (1 - p_mid) / n)
    assert abs(np.mean(np.abs(x) <= 0.5) - p_mid) < 3 * se


def test_power_r1_tail_mass_per_side():
    # integral of (1 - u) / (2 pi) over [0, 1] is 1/(4 pi) per side
    n = 200_000
    x = circle.sample_power_smeary(1.0, n, 23)
    p = 1 / (4 * PI)
    se = math.sqrt(p * (1 - p) / n)
    assert abs(np.mean(x >= PI - 1) - p) < 3 * se
    assert abs(np.mean(x <= -PI + 1) - p) < 3 * se


def test_log_sampler_support():
    x = circle.sample_log_smeary(1.0, 50_000, 4)
    assert np.all((np.abs(x) <= 0.5) | (np.abs(x) >= PI - 0.5))


def test_sampler_is_seed_deterministic():
    a = circle.sample_power_smeary(1.0, 1000, 9)
    b = circle.sample_power_smeary(1.0, 1000, 9)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_density_rejects_nonpositive_r(bad):
    with pytest.raises(InvalidInput):
        circle.power_smeary_density(bad)
    with pytest.raises(InvalidInput):
        circle.log_smeary_density(bad)


# ----------------------------------------------------------------------------
# CLT statistics


@pytest.mark.parametrize("modulus", [circle.power_modulus(1.0), circle.power_modulus(2.0),
                                     circle.log_modulus(1.0)], ids=["pow1", "pow2", "log1"])
def test_modulus_check(modulus):
    assert modulus.check()


def test_clt_variance_part_i():
    assert circle.clt_variance_part_i(1.0, 0.0) == 1.0
    assert circle.clt_variance_part_i(1.0, 1 / (4 * PI)) == pytest.approx(4.0, rel=1e-14)
    with pytest.raises(OutOfRegime):
        circle.clt_variance_part_i(2.0, 1 / (2 * PI))
    # blows up approaching the boundary
    assert circle.clt_variance_part_i(2.0, (1 - 1e-4) / (2 * PI)) > 1e8


def test_rescaled_statistic():
    g = circle.power_modulus(1.0)
    assert circle.rescaled_statistic_part_ii(0.0, g, 10_000) == 0.0
    assert circle.rescaled_statistic_part_ii(0.1, g, 10_000) == pytest.approx(0.5, rel=1e-13)
    assert circle.rescaled_statistic_part_ii(-0.1, g, 10_000) == pytest.approx(-0.5, rel=1e-13)
    with pytest.raises(OutOfDomain):
        circle.rescaled_statistic_part_ii(1.5, g, 10_000)


def test_log_statistics_at_the_attractor():
    n, r = 10**6, 1.0
    mu = 1 / math.log(math.sqrt(n)) ** (1 / r)
    scaled, centred = circle.log_smeary_statistics(mu, r, n)
    assert float(scaled) == pytest.approx(1.0, rel=1e-14)
    assert float(centred) == pytest.approx(0.0, abs=1e-12)
