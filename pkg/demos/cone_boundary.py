"""Boundary points of the rank-bounded cones and why the ODE preserves them.

Draws boundary forms, then shows the three quantities that keep the
reaction ODE inside the cone: Q at the null direction, the smallest
eigenvalue of the mainstep operator, and the vanishing of F there.
"""

import numpy as np

from harnack_lab import cones, tensors
from harnack_lab.cones import ConeSpec


def main():
    rng = np.random.default_rng(0)
    print(f"{'dim':>3} {'k':>2} {'shift':>9} {'Q(w,w)':>10} {'mainstep':>10} {'F(w,w)':>10}")
    for m, k in [(3, 1), (4, 1), (4, 2), (5, 1), (6, 2), (6, 3)]:
        b = cones.boundary_sample(ConeSpec(m, k), seed=m * 10 + k)
        scale = tensors.norm(b.form)
        q = cones.ode_invariance_check(b.form, b.witness) / scale**2
        ms = cones.mainstep_check(b.form, b.witness)
        _, f = cones.gl_boundary_tangency(b.form, b.witness, rng.standard_normal((m, m)))
        print(f"{m:>3} {k:>2} {b.shift:9.4f} {q:10.4f} {ms.min_eigenvalue / scale:10.2e} {f / scale**2:10.1e}")

    M = tensors.random_form(6, rng)
    print("\nnested margins of a random form in dim 6:")
    for v in cones.nested_membership(M, 6, restarts=16):
        print(f"    k={v.k}  margin {v.margin:+.6f}  {v.status}  witness rank {v.witness_rank}")


if __name__ == "__main__":
    main()
