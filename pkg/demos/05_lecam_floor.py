"""Two-point lower bound for mean estimation on the circle.

Mixing a uniform base with a small atom at x or at its antipode y gives two
laws that are hard to tell apart from n draws but have means pi apart. No
estimator can beat the resulting floor on the squared risk, and even the best
test errs with probability close to a fair coin.
"""
import math

from frechet_lab import lowerbound as lb
from frechet_lab.spaces import circle_space, make_sampler


def main():
    x, y = 0.0, -math.pi
    base = make_sampler("circle.uniform").sampler
    space = circle_space()
    for t, n in [(1e-3, 100), (1e-3, 1000), (1e-2, 1000)]:
        family = lb.PerturbedFamily(base, [x, y], t, diameter=math.pi)
        rep = lb.lecam_experiment(family, x, y, lb.estimator_suite(space, x, y), n=n, p=2.0, reps=200, seed=1)
        print(f"t={t:g}, n={n}: finite-n floor {rep.floors.finite_n_floor:.3f}")
        for row in rep.estimators:
            print(f"  {row.name:>13}: sup risk {row.sup_risk:.3f} +- {row.worst.std_error:.3f}")
        plug = lb.test_errors(lb.plugin_test(space, x, y), family, x, y, n, 1000, seed=2)
        print(f"  plug-in test max error {plug.max_error:.3f} (Hellinger floor {plug.floor:.3f})")


if __name__ == "__main__":
    main()
