"""How the deviation interval widths scale with the sample size.

Three interval families side by side: the finite-class interval fed by a
known complexity, the cover plug-in variant, and the width-only interval
for one-layer networks (which depends on the input dimension but not on
the number of units).
"""

import numpy as np

from riskbounds import (
    nn_generalization_ci,
    rademacher_ci,
    rademacher_cover_bound,
    RademacherCIInputs,
)


def finite_class_width(n, delta):
    # toy scaling: complexity ~ sqrt(n), envelope ~ sqrt(n) for bounded rows
    env = np.sqrt(n)
    rad = 0.5 * np.sqrt(n)
    return rademacher_ci(
        RademacherCIInputs(n=n, envelope_l2_sup=env, rad=rad, delta=delta)
    )


def cover_width(n, delta):
    env = np.sqrt(n)
    rad = rademacher_cover_bound(envelope_l2=env, r=0.05, n=n, cover_size=64)
    return rademacher_ci(
        RademacherCIInputs(n=n, envelope_l2_sup=env, rad=rad, delta=delta)
    )


def main():
    delta = 0.05
    print(" n        finite/n   cover/n    nn width (d=2)")
    for n in (100, 1000, 10000, 100000):
        fw = finite_class_width(n, delta) / n
        cw = cover_width(n, delta) / n
        nn = nn_generalization_ci(n=n, d=2, B=1.0, delta=delta)
        print(f"{n:7d}   {fw:8.4f}   {cw:8.4f}   {nn:10.4f}")

    print("\nthe per-sample widths shrink like 1/sqrt(n); the network width")
    print("is the same for 1 unit or a million:")
    a = nn_generalization_ci(n=10000, d=2, B=1.0, delta=delta, units=1)
    b = nn_generalization_ci(n=10000, d=2, B=1.0, delta=delta, units=10**6)
    print(f"  units=1: {a:.6f}   units=1e6: {b:.6f}   equal: {a == b}")


if __name__ == "__main__":
    main()
