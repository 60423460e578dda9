"""Watch the expanding soliton approach its N -> infinity limit.

For each catalog model, prints |E_N| and |R(g_N) - R_inf|_h on a grid of N
together with their fitted log-log slopes, then the limit Ricci form of the
shrinking sphere at t = 0.1.
"""

import numpy as np

from harnack_lab import flows, soliton

NS = [1e2, 1e3, 1e4, 1e5, 1e6]


def main():
    for model in flows.catalog():
        x = np.full(model.n, 0.2)
        t = 0.2
        defect = soliton.defect_sequence(model, x, t, NS)
        dist = soliton.limit_sequence(model, x, t, NS)
        print(f"{model.label:>14}  t={t}")
        for N, e, d in zip(NS, defect, dist):
            print(f"    N={N:8.0e}  |E_N|={e:.3e}  N|E_N|={N * e:.4f}  |R_N - R_inf|={d:.3e}")
        print(f"    slopes: defect {soliton.loglog_slope(NS, defect):+.4f}", end="")
        if min(dist) > 0:
            print(f"  limit {soliton.loglog_slope(NS, dist):+.4f}")
        else:
            print("  limit (exact)")

    pkg = soliton.limit_package(flows.sphere(3, 1.0), np.zeros(3), 0.1)
    np.set_printoptions(precision=5, suppress=True)
    print("\nRic_inf of the shrinking sphere at t = 0.1 (time first):")
    print(pkg.Ric_inf)
    print(f"Ric_inf(d/dt, d/dt) = {pkg.Ric_inf[0, 0]:.6f} = 250/3")


if __name__ == "__main__":
    main()
