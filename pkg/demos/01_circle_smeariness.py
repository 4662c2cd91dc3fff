"""Smeary means on the circle.

A law whose density near the antipode equals 1/(2 pi) flattens the Fréchet
function at the mean, so the empirical mean converges slower than n^{-1/2}.
This script computes exact intrinsic means, fits the convergence rate for the
power-smeary laws and prints the variance modulation of a non-smeary mixture.
"""
import math

import numpy as np

from frechet_lab import circle, core
from frechet_lab.spaces import circle_space, make_sampler


def main():
    atoms = [-math.pi / 2, 0.0, math.pi / 2]
    ms = circle.intrinsic_mean_exact(atoms)
    print(f"mean of {np.round(atoms, 3).tolist()}: {ms.minimizers[0]:+.3e}, value {ms.frechet_value:.4f}")
    ms = circle.intrinsic_mean_exact([-math.pi / 2, math.pi / 2])
    print(f"atoms at +-pi/2 have {len(ms.minimizers)} means: {np.round(ms.minimizers, 4).tolist()}")

    print("\nrate of E|mean| for the power-smeary laws (300 reps per n)")
    for r in (1, 2):
        spec = make_sampler("circle.pow", {"r": r})
        slope, se = core.rate_estimate(spec.sampler, 0.0, [100, 1000, 10_000], 300, seed=r)
        print(f"  r={r}: slope {slope:+.3f} +- {se:.3f}  (smeary limit {-1 / (2 * r + 2):+.3f}, Euclidean -0.5)")

    spec = make_sampler("circle.mixture", {"weight": 0.5})
    curve = core.variance_modulation(circle_space(), spec.sampler, 0.0, spec.population_var(),
                                     [100, 1000, 10_000], 300, seed=3)
    print("\nvariance modulation, 1/2 uniform + 1/2 uniform[-1/2, 1/2] (limit 4)")
    for n, m_n in curve.entries:
        print(f"  n={n:>6}: m_n = {m_n:.2f}")


if __name__ == "__main__":
    main()
