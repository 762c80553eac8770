"""Revenue-maximizing posted item prices for one unit-demand buyer of unknown type.

The buyer's type is drawn from a finite distribution. Unsold items may carry
any price, so this is the Walrasian maximum-price problem with the
unsold-at-zero condition dropped.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from .core import InstanceError, PriceVector, rational_from_json, rational_to_json

MAX_ITEMS = 4
DEFAULT_BUDGET = 2_000_000


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class TypeDistribution:
    types: tuple[tuple[int, ...], ...]
    probs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "types", tuple(tuple(t) for t in self.types))
        object.__setattr__(self, "probs", tuple(Fraction(p) for p in self.probs))
        problems = validate_distribution(self)
        if problems:
            raise InstanceError("", "; ".join(problems))

    @property
    def n_items(self) -> int:
        return len(self.types[0])

    @property
    def max_value(self) -> int:
        return max(v for t in self.types for v in t)


def validate_distribution(dist: TypeDistribution) -> list[str]:
    out = []
    if not dist.types:
        return ["distribution needs at least one type"]
    if len(dist.types) != len(dist.probs):
        out.append("types and probs differ in length")
    m = len(dist.types[0])
    if m < 1:
        out.append("type vectors must be nonempty")
    for t, vec in enumerate(dist.types):
        if len(vec) != m:
            out.append(f"type {t} has length {len(vec)}, expected {m}")
        for j, v in enumerate(vec):
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                out.append(f"type {t} has invalid value at item {j}")
    if any(p < 0 for p in dist.probs):
        out.append("probabilities must be nonnegative")
    if sum(dist.probs, Fraction(0)) != 1:
        out.append("probabilities must sum to exactly 1")
    return out


@dataclass(frozen=True)
class PostedPriceResult:
    prices: PriceVector
    expected_revenue: Fraction
    per_type_choice: tuple[int | None, ...]


def buyer_choice(values: Sequence[int], prices: Sequence) -> int | None:
    """Utility-maximizing item, or ``None`` if every utility is negative.

    The buyer purchases at zero utility; ties go to the higher price, then
    the lower index.
    """
    if len(values) != len(prices):
        raise ValueError("values and prices differ in length")
    best = None
    best_key = None
    for j, (v, p) in enumerate(zip(values, prices)):
        u = v - p
        if u < 0:
            continue
        key = (u, p)
        if best_key is None or key > best_key:
            best, best_key = j, key
    return best


def _evaluate(dist: TypeDistribution, prices) -> tuple[Fraction, tuple]:
    choices = tuple(buyer_choice(t, prices) for t in dist.types)
    rev = sum(
        (q * prices[c] for q, c in zip(dist.probs, choices) if c is not None),
        Fraction(0),
    )
    return rev, choices


def candidate_levels(dist: TypeDistribution) -> list[Fraction]:
    """Per-item price levels: multiples of 1/D up to V, plus a priced-out level V+1.

    D is the lcm of the probability denominators and V the largest value.
    """
    D = math.lcm(*(p.denominator for p in dist.probs))
    V = dist.max_value
    return [Fraction(k, D) for k in range(V * D + 1)] + [Fraction(V + 1)]


def max_posted_revenue(dist: TypeDistribution, budget: int = DEFAULT_BUDGET) -> PostedPriceResult:
    """Exact search for the revenue-maximizing price vector.

    Among optimal price vectors the lexicographically smallest is returned.
    """
    if dist.n_items > MAX_ITEMS:
        raise BudgetExceeded(f"posted-price search supports at most {MAX_ITEMS} items")
    levels = candidate_levels(dist)
    size = len(levels) ** dist.n_items
    if size > budget:
        raise BudgetExceeded(f"{size} candidate price vectors exceed the budget of {budget}")
    best = None
    # product() walks vectors in lexicographic order, so strict improvement
    # keeps the smallest optimum.
    for prices in itertools.product(levels, repeat=dist.n_items):
        rev, choices = _evaluate(dist, prices)
        if best is None or rev > best[0]:
            best = (rev, prices, choices)
    rev, prices, choices = best
    return PostedPriceResult(PriceVector(prices), rev, choices)


# -- JSON ---------------------------------------------------------------------


def distribution_from_doc(doc: Any) -> TypeDistribution:
    if not isinstance(doc, dict) or doc.get("type") != "distribution":
        raise InstanceError("type", 'expected "distribution"')
    m = doc.get("items")
    if not isinstance(m, int) or isinstance(m, bool) or not 1 <= m <= MAX_ITEMS:
        raise InstanceError("items", f"must be an integer in 1..{MAX_ITEMS}")
    entries = doc.get("types")
    if not isinstance(entries, list) or not entries:
        raise InstanceError("types", "expected a nonempty list")
    types, probs = [], []
    for t, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise InstanceError(f"types[{t}]", "expected an object")
        vals = entry.get("values")
        if not isinstance(vals, list) or len(vals) != m:
            raise InstanceError(f"types[{t}].values", f"expected a list of {m} integers")
        for j, v in enumerate(vals):
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise InstanceError(f"types[{t}].values[{j}]", "expected a nonnegative integer")
        p = rational_from_json(entry.get("prob"), f"types[{t}].prob")
        if p < 0:
            raise InstanceError(f"types[{t}].prob", "negative probability")
        types.append(tuple(vals))
        probs.append(p)
    if sum(probs, Fraction(0)) != 1:
        raise InstanceError("types", "probabilities must sum to exactly 1")
    return TypeDistribution(tuple(types), tuple(probs))


def distribution_to_doc(dist: TypeDistribution) -> dict:
    return {
        "type": "distribution",
        "items": dist.n_items,
        "types": [
            {"values": list(t), "prob": rational_to_json(p)} for t, p in zip(dist.types, dist.probs)
        ],
    }


def parse_distribution(text: str) -> TypeDistribution:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError("", f"malformed JSON: {exc}") from None
    return distribution_from_doc(doc)
