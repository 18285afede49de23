"""Covering numbers of a truncated-linear grid class, against entropy curves.

Builds a grid discretization of truncated linear functions on the square,
covers its evaluation table greedily at a range of radii, and compares the
log cover sizes with the closed-form entropy estimate for a class of the
matching combinatorial dimension.  Also shows the growth-rate classifier.
"""

import math

import numpy as np

from riskbounds import (
    EntropyEstimate,
    GridSpec,
    SequentialSample,
    TruncatedLinear,
    classify_entropy,
    evaluate_class,
    exact_cover_size,
    greedy_cover,
    vc_dimension_bound,
    vc_entropy,
)


def main():
    cls = TruncatedLinear(
        basis="linear",
        dim=2,
        B=1.0,
        grid=GridSpec(axes=(np.linspace(-1, 1, 15), np.linspace(-1, 1, 15))),
    )
    V = vc_dimension_bound(cls)
    print(f"grid class: {cls.grid.resolve().shape[0]} functions, dimension bound {V}")

    rng = np.random.default_rng(5)
    sample = SequentialSample(points=rng.uniform(-1, 1, size=(30, 2)))
    table = evaluate_class(cls, sample)

    print("\n radius   greedy  log(greedy)  entropy bound")
    for r in (0.25, 0.15, 0.08, 0.04, 0.02):
        cover = greedy_cover(table, r)
        print(
            f"  {r:5.2f}   {cover.size:5d}   {math.log(cover.size):9.3f}"
            f"   {vc_entropy(V, cls.B, r):12.3f}"
        )

    # exact covers are affordable for small tables only
    small = FunctionTableSubset(table, rows=12)
    greedy = greedy_cover(small, 0.15)
    exact = exact_cover_size(small, 0.15)
    print(f"\n12-row subset at r=0.15: greedy {greedy.size}, exact {exact.size}")

    for name, est in (
        ("vc-type      ", EntropyEstimate.vc(V, 1.0)),
        ("one-layer net", EntropyEstimate.neural_net(2, 4, 1.0)),
    ):
        tag = classify_entropy(est)
        print(f"{name} entropy growth: {tag.kind}")


def FunctionTableSubset(table, rows):
    from riskbounds import FunctionTable

    return FunctionTable(table.values[:rows])


if __name__ == "__main__":
    main()
