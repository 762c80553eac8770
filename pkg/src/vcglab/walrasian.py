"""Walrasian equilibria of matching markets.

For a fixed welfare-optimal matching the equilibrium conditions are all
difference constraints between item prices (plus a zero reference), so the
feasible price set is a lattice whose componentwise maximum and minimum are
shortest-path distances. Every optimal matching supports the same price set,
so the tie-broken optimum is used as the support. Integer values give
integer extreme prices.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .core import Matching, MatchingInstance, PriceVector, check_matching
from .validation import check_matching_instance
from .welfare import iter_matchings, max_welfare_matching

ORACLE_MAX_SIDE = 4


class EquilibriumNotFound(RuntimeError):
    """Internal defect: equilibria always exist in assignment markets."""


@dataclass(frozen=True)
class WalrasianCertificate:
    prices: PriceVector
    matching: Matching
    demand_slack: tuple[Fraction, ...]


def _violations(values, prices, items_of) -> list[str]:
    """Conditions (favorite items, unsold at zero) for a per-buyer item tuple."""
    out = []
    m = len(prices)
    for i, row in enumerate(values):
        best = max(row[j] - prices[j] for j in range(m))
        j = items_of[i]
        if j is None:
            if best > 0:
                out.append(f"unmatched buyer {i} has positive utility {best}")
        else:
            mine = row[j] - prices[j]
            if mine < 0:
                out.append(f"buyer {i} has negative utility {mine} for assigned item {j}")
            if best > mine:
                fav = next(k for k in range(m) if row[k] - prices[k] == best)
                out.append(
                    f"buyer {i} strictly prefers item {fav} (utility {best} > {mine})"
                )
    sold = {j for j in items_of if j is not None}
    for j in range(m):
        if j not in sold and prices[j] != 0:
            out.append(f"unsold item {j} has price {prices[j]}")
    return out


def _supports(values, prices, items_of) -> bool:
    """Boolean fast path of :func:`_violations`."""
    m = len(prices)
    for i, row in enumerate(values):
        best = max(row[j] - prices[j] for j in range(m))
        j = items_of[i]
        if j is None:
            if best > 0:
                return False
        elif row[j] - prices[j] < max(best, 0):
            return False
    for j in range(m):
        if prices[j] != 0 and j not in items_of:
            return False
    return True


def check_walrasian(
    inst: MatchingInstance, prices: PriceVector | Sequence, matching: Matching
) -> WalrasianCertificate | list[str]:
    """Certificate if (prices, matching) is a Walrasian equilibrium, else the violations."""
    inst = check_matching_instance(inst)
    if not isinstance(prices, PriceVector):
        prices = PriceVector(tuple(prices))
    if len(prices) != inst.n_items:
        return [f"price vector has length {len(prices)}, expected {inst.n_items}"]
    check_matching(inst, matching)
    items_of = [matching.item_of(i) for i in range(inst.n_buyers)]
    problems = _violations(inst.values, prices.prices, items_of)
    if problems:
        return problems
    slack = []
    for i, row in enumerate(inst.values):
        best = max(max(row[j] - prices[j] for j in range(inst.n_items)), Fraction(0))
        j = items_of[i]
        slack.append(best - (row[j] - prices[j] if j is not None else 0))
    return WalrasianCertificate(prices, matching, tuple(slack))


def _constraint_edges(inst: MatchingInstance, matching: Matching):
    """Edges (u, v, w) meaning p[v] - p[u] <= w; node 0 is the zero reference, item j is j+1."""
    m = inst.n_items
    edges = []
    sold = set()
    for i, row in enumerate(inst.values):
        k = matching.item_of(i)
        if k is None:
            for j in range(m):
                edges.append((j + 1, 0, -row[j]))
            continue
        sold.add(k)
        edges.append((0, k + 1, row[k]))
        for j in range(m):
            if j != k:
                edges.append((j + 1, k + 1, row[k] - row[j]))
    for j in range(m):
        edges.append((j + 1, 0, 0))
        if j not in sold:
            edges.append((0, j + 1, 0))
    return edges


def _shortest_from_zero(n_nodes: int, edges) -> list[int]:
    inf = float("inf")
    dist = [inf] * n_nodes
    dist[0] = 0
    for _ in range(n_nodes - 1):
        changed = False
        for u, v, w in edges:
            if dist[u] != inf and dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
        if not changed:
            break
    for u, v, w in edges:
        if dist[u] != inf and dist[u] + w < dist[v]:
            raise EquilibriumNotFound("price constraints are infeasible for this matching")
    return dist


def _extreme_prices(inst: MatchingInstance, matching: Matching, highest: bool) -> PriceVector:
    edges = _constraint_edges(inst, matching)
    n_nodes = inst.n_items + 1
    if highest:
        dist = _shortest_from_zero(n_nodes, edges)
        prices = dist[1:]
    else:
        dist = _shortest_from_zero(n_nodes, [(v, u, w) for u, v, w in edges])
        prices = [-d for d in dist[1:]]
    # Every item price is bounded on both sides (p >= 0, sold <= value, unsold = 0).
    return PriceVector(tuple(Fraction(p) for p in prices))


def _extreme(inst, matching, highest):
    inst = check_matching_instance(inst)
    if matching is None:
        matching = max_welfare_matching(inst).allocation
    else:
        check_matching(inst, matching)
    prices = _extreme_prices(inst, matching, highest)
    if isinstance(check_walrasian(inst, prices, matching), list):
        raise EquilibriumNotFound("computed prices failed certification")
    return prices, matching


def min_walrasian(inst: MatchingInstance, matching: Matching | None = None):
    """Componentwise-minimum Walrasian prices with their supporting matching.

    ``matching`` defaults to the tie-broken welfare optimum; any optimal
    matching gives the same prices.
    """
    return _extreme(inst, matching, highest=False)


def max_walrasian(inst: MatchingInstance, matching: Matching | None = None):
    """Componentwise-maximum Walrasian prices with their supporting matching."""
    return _extreme(inst, matching, highest=True)


def oracle_walrasian_set(inst: MatchingInstance, price_bound: int):
    """All integer price vectors in [0, price_bound]^m that some matching supports.

    Brute force over the price grid and every matching; independent of the
    shortest-path computation above.
    """
    inst = check_matching_instance(inst)
    if inst.n_buyers > ORACLE_MAX_SIDE or inst.n_items > ORACLE_MAX_SIDE:
        raise ValueError(f"grid oracle limited to {ORACLE_MAX_SIDE}x{ORACLE_MAX_SIDE}")
    if price_bound < inst.max_value:
        raise ValueError("price_bound must be at least the largest value")
    matchings = list(iter_matchings(inst.n_buyers, inst.n_items))
    out = []
    for prices in itertools.product(range(price_bound + 1), repeat=inst.n_items):
        for combo in matchings:
            if _supports(inst.values, prices, combo):
                out.append((PriceVector(prices), Matching.from_items(combo)))
                break
    return out
