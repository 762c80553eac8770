"""Welfare-maximizing allocations and brute-force oracles.

Ties between optimal allocations are broken deterministically: read the
allocation as a per-buyer vector of assigned items (unmatched sorting after
every item) and take the lexicographically smallest. For single-minded bids
the per-bid vector is win-before-lose, so lower-indexed bids win ties.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

from .core import (
    BundleAllocation,
    Matching,
    MatchingInstance,
    SingleMindedInstance,
)

ORACLE_MAX_SIDE = 6
ORACLE_MAX_BIDS = 16


class OracleTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class WelfareResult:
    best_value: int
    allocation: Matching | BundleAllocation


def matching_value(inst: MatchingInstance, matching: Matching) -> int:
    return sum(inst.values[i][j] for i, j in matching.pairs)


def bundle_value(inst: SingleMindedInstance, alloc: BundleAllocation) -> int:
    return sum(inst.bids[b].value for b in alloc.winners)


def buyer_value(inst, allocation, buyer: int) -> int:
    """Value buyer ``buyer`` obtains from ``allocation`` (0 if not served)."""
    if isinstance(inst, MatchingInstance):
        j = allocation.item_of(buyer)
        return 0 if j is None else inst.values[buyer][j]
    return inst.bids[buyer].value if buyer in allocation.winners else 0


DP_STATE_LIMIT = 1 << 12


def _assignment_value(rows: list[tuple[int, ...]], cols: list[int]) -> int:
    """Maximum matching value of ``rows`` restricted to item columns ``cols``.

    Integer Hungarian method with potentials on costs ``-v``; values are
    nonnegative, so a matching of the smaller side is optimal.
    """
    if not rows or not cols:
        return 0
    a = [[-row[j] for j in cols] for row in rows]
    if len(a) > len(a[0]):
        a = [list(col) for col in zip(*a)]
    n, m = len(a), len(a[0])
    inf = float("inf")
    u = [0] * (n + 1)
    v = [0] * (m + 1)
    p = [0] * (m + 1)
    way = [0] * (m + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [inf] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = inf
            j1 = 0
            ai = a[i0 - 1]
            for j in range(1, m + 1):
                if not used[j]:
                    cur = ai[j - 1] - u[i0] - v[j]
                    if cur < minv[j]:
                        minv[j] = cur
                        way[j] = j0
                    if minv[j] < delta:
                        delta = minv[j]
                        j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    return -sum(a[p[j] - 1][j - 1] for j in range(1, m + 1) if p[j])


def _lex_dp(rows, buyers, m):
    k = len(rows)

    @lru_cache(maxsize=None)
    def best(pos: int, used: int) -> int:
        if pos == k:
            return 0
        row = rows[pos]
        top = best(pos + 1, used)
        for j in range(m):
            if not used >> j & 1:
                cand = row[j] + best(pos + 1, used | 1 << j)
                if cand > top:
                    top = cand
        return top

    total = best(0, 0)
    # Walk forward taking the first option (items in order, then unmatched)
    # that still reaches the optimum.
    pairs = []
    used = 0
    remaining = total
    for pos, row in enumerate(rows):
        for j in range(m):
            if not used >> j & 1 and row[j] + best(pos + 1, used | 1 << j) == remaining:
                pairs.append((buyers[pos], j))
                used |= 1 << j
                remaining -= row[j]
                break
    best.cache_clear()
    return total, pairs


def _lex_hungarian(rows, buyers, m):
    total = _assignment_value(rows, list(range(m)))
    pairs = []
    free = list(range(m))
    remaining = total
    for pos, row in enumerate(rows):
        rest = rows[pos + 1 :]
        for j in free:
            if row[j] + _assignment_value(rest, [c for c in free if c != j]) == remaining:
                pairs.append((buyers[pos], j))
                free.remove(j)
                remaining -= row[j]
                break
    return total, pairs


def max_welfare_matching(
    inst: MatchingInstance, excluded: Iterable[int] = (), method: str = "auto"
) -> WelfareResult:
    """Maximum-value matching of the non-excluded buyers.

    ``method="dp"`` runs a dynamic program over (buyer, used-item mask);
    ``"hungarian"`` fixes buyers one at a time against integer Hungarian
    solves. ``"auto"`` picks the DP when its state space is small. Both are
    exact and apply the same tie-break.
    """
    skip = set(excluded)
    buyers = [i for i in range(inst.n_buyers) if i not in skip]
    rows = [inst.values[i] for i in buyers]
    m = inst.n_items
    if method == "auto":
        method = "dp" if len(rows) << m <= DP_STATE_LIMIT else "hungarian"
    if method == "dp":
        total, pairs = _lex_dp(rows, buyers, m)
    elif method == "hungarian":
        total, pairs = _lex_hungarian(rows, buyers, m)
    else:
        raise ValueError(f"unknown method {method!r}")
    return WelfareResult(total, Matching(tuple(pairs)))


def _sm_best_value(values: list[int], masks: list[int], start: int, used: int) -> int:
    """Branch and bound over bids ``start..`` given items in ``used`` are taken."""
    order = sorted(
        (b for b in range(start, len(values)) if not masks[b] & used and values[b] > 0),
        key=lambda b: -values[b],
    )
    vals = [values[b] for b in order]
    msks = [masks[b] for b in order]
    suffix = [0] * (len(order) + 1)
    for t in range(len(order) - 1, -1, -1):
        suffix[t] = suffix[t + 1] + vals[t]

    best = 0

    def dfs(t: int, taken: int, acc: int) -> None:
        nonlocal best
        if acc > best:
            best = acc
        if t == len(order) or acc + suffix[t] <= best:
            return
        # Tighter bound: only bids still compatible with the current set.
        if acc + sum(vals[s] for s in range(t, len(order)) if not msks[s] & taken) <= best:
            return
        if not msks[t] & taken:
            dfs(t + 1, taken | msks[t], acc + vals[t])
        dfs(t + 1, taken, acc)

    dfs(0, used, 0)
    return best


def max_welfare_single_minded(
    inst: SingleMindedInstance, excluded: Iterable[int] = ()
) -> WelfareResult:
    """Winner determination: heaviest set of pairwise-disjoint winning bundles."""
    skip = set(excluded)
    values = [0 if b in skip else bid.value for b, bid in enumerate(inst.bids)]
    masks = [bid.mask for bid in inst.bids]
    live = [b not in skip for b in range(len(values))]
    total = _sm_best_value(values, masks, 0, 0)

    winners = []
    used = 0
    acc = 0
    for b in range(len(values)):
        if not live[b] or masks[b] & used:
            continue
        if acc + values[b] + _sm_best_value(values, masks, b + 1, used | masks[b]) == total:
            winners.append(b)
            used |= masks[b]
            acc += values[b]
    return WelfareResult(total, BundleAllocation(frozenset(winners)))


def max_welfare(inst, excluded: Iterable[int] = ()) -> WelfareResult:
    if isinstance(inst, MatchingInstance):
        return max_welfare_matching(inst, excluded)
    return max_welfare_single_minded(inst, excluded)


# -- oracles ------------------------------------------------------------------


def iter_matchings(n_buyers: int, n_items: int, buyers: Iterable[int] | None = None):
    """Yield every partial injective matching as a per-buyer tuple (None = unmatched)."""
    buyers = list(range(n_buyers)) if buyers is None else list(buyers)
    allowed = set(buyers)
    choices = [list(range(n_items)) + [None] if i in allowed else [None] for i in range(n_buyers)]
    for combo in itertools.product(*choices):
        taken = [j for j in combo if j is not None]
        if len(taken) == len(set(taken)):
            yield combo


def oracle_enumerate_matchings(inst: MatchingInstance) -> list[tuple[Matching, int]]:
    """Every feasible matching with its welfare, by explicit enumeration."""
    if inst.n_buyers > ORACLE_MAX_SIDE or inst.n_items > ORACLE_MAX_SIDE:
        raise OracleTooLarge(f"enumeration limited to {ORACLE_MAX_SIDE}x{ORACLE_MAX_SIDE}")
    out = []
    for combo in iter_matchings(inst.n_buyers, inst.n_items):
        welfare = sum(inst.values[i][j] for i, j in enumerate(combo) if j is not None)
        out.append((Matching.from_items(combo), welfare))
    return out


def oracle_max_welfare_matching(inst: MatchingInstance, excluded: Iterable[int] = ()) -> int:
    skip = set(excluded)
    keep = [i for i in range(inst.n_buyers) if i not in skip]
    best = 0
    for combo in iter_matchings(inst.n_buyers, inst.n_items, keep):
        w = sum(inst.values[i][j] for i, j in enumerate(combo) if j is not None)
        best = max(best, w)
    return best


def oracle_enumerate_bundles(inst: SingleMindedInstance, excluded: Iterable[int] = ()):
    """Every feasible winner set (pairwise-disjoint bundles) with its welfare."""
    if inst.n_buyers > ORACLE_MAX_BIDS:
        raise OracleTooLarge(f"enumeration limited to {ORACLE_MAX_BIDS} bids")
    skip = set(excluded)
    live = [b for b in range(inst.n_buyers) if b not in skip]
    out = []
    for r in range(len(live) + 1):
        for subset in itertools.combinations(live, r):
            masks = [inst.bids[b].mask for b in subset]
            union = 0
            ok = True
            for mk in masks:
                if union & mk:
                    ok = False
                    break
                union |= mk
            if ok:
                out.append((BundleAllocation(frozenset(subset)), sum(inst.bids[b].value for b in subset)))
    return out


def oracle_max_welfare(inst, excluded: Iterable[int] = ()) -> int:
    if isinstance(inst, MatchingInstance):
        return oracle_max_welfare_matching(inst, excluded)
    return max(w for _, w in oracle_enumerate_bundles(inst, excluded))
