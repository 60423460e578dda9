"""Harnack verdicts across the flow catalog.

The trace margin is the smallest eigenvalue of Ric_inf relative to h; the
C_k verdicts test R_inf against the rank-bounded cones and record whether
the curvature hypothesis holds, making the conclusion applicable.
"""

import numpy as np

from harnack_lab import flows, harnack


def main():
    for model in flows.catalog():
        rng = np.random.default_rng(1)
        xs, ts = model.sample_points(rng, 3)
        print(model.label)
        for x, t in zip(xs, ts):
            tv = harnack.trace_harnack(model, x, t)
            ks = range(1, (model.n + 1) // 2 + 1)
            labels = [harnack.ck_harnack(model, x, t, k, restarts=16).label for k in ks]
            print(f"    t={t:.3f}  trace margin {tv.margin:+.4e} ({tv.status})  C_k: {', '.join(labels)}")


if __name__ == "__main__":
    main()
