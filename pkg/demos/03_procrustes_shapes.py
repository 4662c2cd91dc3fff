"""Full Procrustes means of planar triangles.

Noisy, randomly rotated copies of a scalene triangle are mapped to the
pre-shape sphere. The Procrustes mean is the top eigenvector of the average
of x x^T after vectorising. Its scaled fluctuations are compared with two
covariance predictions: H^- D H^- with D = Cov((X^T v1) X), and the gradient
sandwich H^- Cov(grad) H^-.
"""
import math

import numpy as np

from frechet_lab import shapes
from frechet_lab.core import rep_rng
from frechet_lab.spaces import sample_triangles, triangle_base


def main():
    xi = shapes.preshape(triangle_base())
    population = shapes.align(xi, sample_triangles(0.05, 200_000, np.random.default_rng(0)))
    eig = shapes.EigenStructure.from_sample(population)
    print("eigenvalues of E[x x^T]:", np.round(eig.lambdas, 5))

    n, reps, z = 1000, 300, []
    for r in range(reps):
        mean = shapes.procrustes_mean(sample_triangles(0.05, n, rep_rng(4, r))).minimizers[0]
        mean = shapes.align(xi, mean[None])[0]
        z.append(math.sqrt(n) * shapes.vec(shapes.chart(mean, xi)))
    emp = np.cov(np.array(z), rowvar=False, bias=True)
    for name, cov in [("H^- D H^-", shapes.clt_cov_procrustes(eig)),
                      ("sandwich", shapes.clt_cov_procrustes_sandwich(population, eigen=eig))]:
        err = np.linalg.norm(emp - cov) / np.linalg.norm(cov)
        print(f"{name:>10}: relative Frobenius error {err:.3f}, trace ratio {np.trace(emp) / np.trace(cov):.2f}")


if __name__ == "__main__":
    main()
