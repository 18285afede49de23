"""Exact vs Monte-Carlo sign complexity on small function tables.

The complexity of a finite table is the expected maximum, over rows, of the
row dotted with uniform random signs.  For n columns the exact value is an
average over all 2^n sign vectors; the Monte-Carlo estimator trades that
for a standard error.
"""

import numpy as np

from riskbounds import (
    FunctionTable,
    massart_bound,
    rademacher_exact,
    rademacher_mc,
)


def main():
    # the classic pair: two coordinate indicators on two points
    unit = FunctionTable(np.array([[1.0, 0.0], [0.0, 1.0]]))
    print("unit pair            ", rademacher_exact(unit).value)

    # closing under negation doubles the value here (the worst case)
    balanced = FunctionTable(
        np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    )
    print("balanced closure     ", rademacher_exact(balanced).value)

    rng = np.random.default_rng(0)
    table = FunctionTable(rng.uniform(-1.0, 1.0, size=(12, 16)))

    exact = rademacher_exact(table)
    print("\nrandom 12x16 table")
    print("  exact              ", round(exact.value, 6))

    for draws in (200, 2000, 20000):
        est = rademacher_mc(table, draws=draws, seed=1)
        print(
            f"  mc draws={draws:<6}    {est.value:.6f}  (se {est.std_error:.4f})"
        )

    # the finite-class bound is cheap and never too far off on small tables
    print("  massart bound      ", round(massart_bound(table), 6))


if __name__ == "__main__":
    main()
