"""Blocking a mixing chain: coefficients, block plans, and a checked tail.

A two-state symmetric chain mixes geometrically; its lag-m dependence
coefficient has a closed form we can compare against the generic finite
computation.  The blocked deviation bound is then checked against the
exact tail of the chain, computable here by enumerating all paths.
"""

import itertools

import numpy as np

from riskbounds import (
    blocked_deviation_bound,
    block_indices,
    choose_block_size,
    markov_beta_of_lag,
    single_hypothesis_tail,
    stationary_distribution,
)


def exact_chain_tail(P, pi, h, n, threshold):
    """P(sum_k h(X_k) - n E h > threshold) by path enumeration."""
    mean = float(pi @ h)
    total = 0.0
    for path in itertools.product(range(len(pi)), repeat=n):
        p = pi[path[0]]
        for a, b in zip(path, path[1:]):
            p *= P[a, b]
        if sum(h[s] for s in path) - n * mean > threshold:
            total += p
    return total


def main():
    P = np.array([[0.9, 0.1], [0.1, 0.9]])
    pi = stationary_distribution(P)
    print("stationary law:", pi)

    print("\nlag   beta(lag)   closed form 0.8^m/2")
    for m in (1, 2, 5, 10):
        print(f"{m:3d}   {markov_beta_of_lag(P, pi, m):.6f}    {0.8**m / 2:.6f}")

    n, delta, rate = 200, 0.1, 1.25
    m = choose_block_size(n, delta, rate)
    sizes = sorted({len(b) for b in block_indices(n, m)})
    print(f"\nn={n}, delta={delta}, rate {rate}: {m} blocks, sizes {sizes}")

    # fast-mixing instance where the exact tail is enumerable (2^16 paths)
    Q = np.array([[0.55, 0.45], [0.45, 0.55]])
    pi_q = stationary_distribution(Q)
    n, m = 16, 2
    h = np.array([1.0, -1.0])
    beta = markov_beta_of_lag(Q, pi_q, m)
    print(f"\nstay-0.55 chain, n={n}, {m} blocks, beta({m}) = {beta:.4f}")

    def tail(t, size):
        # |h| = 1 at both states, so a size-L block has envelope sqrt(L)
        return single_hypothesis_tail(t, np.sqrt(size))

    print("threshold   exact tail   blocked bound")
    for t_block in (4.0, 5.0, 6.0):
        bound = blocked_deviation_bound(
            per_block_tail=tail, t=t_block, n=n, m=m, beta_m=beta
        )
        exact = exact_chain_tail(Q, pi_q, h, n, m * t_block)
        print(f"  {m * t_block:5.1f}     {exact:.6f}     {bound.probability:.6f}")


if __name__ == "__main__":
    main()
