"""Instance generators and brute-force oracles shared by the tests."""

import itertools
import random
from fractions import Fraction

from vcglab.core import MatchingInstance
from vcglab.welfare import (
    buyer_value,
    iter_matchings,
    oracle_enumerate_matchings,
    oracle_max_welfare,
)


def random_matching(rng: random.Random, nmax: int, mmax: int, vmax: int) -> MatchingInstance:
    n, m = rng.randint(1, nmax), rng.randint(1, mmax)
    return MatchingInstance(tuple(tuple(rng.randint(0, vmax) for _ in range(m)) for _ in range(n)))


def reduced_matrices(n: int, m: int, vmax: int):
    """One representative per orbit of n x m matrices under buyer and item relabeling."""
    rows = list(itertools.product(range(vmax + 1), repeat=m))
    perms = list(itertools.permutations(range(m)))
    for combo in itertools.combinations_with_replacement(rows, n):
        keep = True
        for perm in perms[1:]:
            other = tuple(sorted(tuple(r[p] for p in perm) for r in combo))
            if other < combo:
                keep = False
                break
        if keep:
            yield MatchingInstance(combo)


def oracle_vcg_payments(inst, allocation):
    """Clarke payments for a given allocation from enumeration-based welfare."""
    total = oracle_max_welfare(inst)
    out = []
    for i in range(inst.n_buyers):
        own = buyer_value(inst, allocation, i)
        out.append(Fraction(oracle_max_welfare(inst, excluded=(i,)) - (total - own)))
    return out


def all_optimal_matchings(inst):
    listing = oracle_enumerate_matchings(inst)
    best = max(w for _, w in listing)
    return [mt for mt, w in listing if w == best]


def items_prices_from_payments(inst, matching, payments):
    prices = [Fraction(0)] * inst.n_items
    for i, j in matching.pairs:
        prices[j] = payments[i]
    return prices


def count_matchings(n, m):
    return sum(1 for _ in iter_matchings(n, m))
