"""Nonunique Wasserstein barycenters and the interpolation region.

Two symmetric two-point measures in the plane have more than one
2-Wasserstein barycenter. The multimarginal linear program finds the optimal
vertices. The second half scans which (gamma, beta) pairs admit a smooth,
strongly convex interpolating potential.
"""
import numpy as np

from frechet_lab import wasserstein as W
from frechet_lab.errors import Empty


def main():
    pts = W.example_points()
    measures = [W.symmetric_pair(pts["A"]), W.symmetric_pair(pts["B"])]
    ms = W.barycenter_multimarginal(measures, [0.5, 0.5])
    print(f"barycenter value {ms.frechet_value:.3f}, {len(ms.minimizers)} vertex barycenters, "
          f"diameter {ms.diameter:.3f}")
    for bary in ms.minimizers:
        print("  support", np.round(bary.support, 3).tolist(), "weights", bary.weights.tolist())

    print("\nfeasible beta for each gamma")
    for gamma in (1.5, 2.0, 2.5, 4.0):
        try:
            region = W.feasible_region(gamma)
            print(f"  gamma={gamma}: beta in [{region.beta_lo:.3f}, {region.beta_hi:.3f}]")
        except Empty:
            print(f"  gamma={gamma}: empty")


if __name__ == "__main__":
    main()
