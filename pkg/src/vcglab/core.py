"""Domain types and the JSON instance format.

Values are nonnegative integers in an abstract minor currency unit. Prices
and payments are :class:`fractions.Fraction` so every comparison is exact.
Indices are 0-based in memory; the JSON format uses 1-based item labels
inside single-minded bundles.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Iterator, Sequence, Union

MAX_MATCHING_SIDE = 16
MAX_SINGLE_MINDED_ITEMS = 30


class InstanceError(ValueError):
    """A serialized or constructed instance violates the format or its invariants.

    ``path`` points at the offending field, e.g. ``values[1][0]``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)


@dataclass(frozen=True)
class MatchingInstance:
    """Unit-demand, unit-supply market; ``values[i][j]`` is buyer i's value for item j."""

    values: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(tuple(row) for row in self.values))

    @property
    def n_buyers(self) -> int:
        return len(self.values)

    @property
    def n_items(self) -> int:
        return len(self.values[0]) if self.values else 0

    @property
    def max_value(self) -> int:
        return max((v for row in self.values for v in row), default=0)


@dataclass(frozen=True)
class Bid:
    """One single-minded bid: all of ``items`` for ``value``, nothing less."""

    items: frozenset[int]
    value: int

    def __post_init__(self):
        object.__setattr__(self, "items", frozenset(self.items))

    @property
    def mask(self) -> int:
        m = 0
        for j in self.items:
            m |= 1 << j
        return m


@dataclass(frozen=True)
class SingleMindedInstance:
    n_items: int
    bids: tuple[Bid, ...]

    def __post_init__(self):
        object.__setattr__(
            self,
            "bids",
            tuple(b if isinstance(b, Bid) else Bid(*b) for b in self.bids),
        )

    @property
    def n_buyers(self) -> int:
        return len(self.bids)


Instance = Union[MatchingInstance, SingleMindedInstance]


@dataclass(frozen=True)
class Matching:
    """Partial injective buyer -> item assignment, stored as sorted (buyer, item) pairs."""

    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        pairs = tuple(sorted((int(i), int(j)) for i, j in self.pairs))
        buyers = [i for i, _ in pairs]
        items = [j for _, j in pairs]
        if len(set(buyers)) != len(buyers):
            raise InstanceError("matching", "a buyer is assigned twice")
        if len(set(items)) != len(items):
            raise InstanceError("matching", "an item is assigned twice")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def from_items(cls, items: Sequence[int | None]) -> "Matching":
        """Build from a per-buyer list of items, ``None`` meaning unmatched."""
        return cls(tuple((i, j) for i, j in enumerate(items) if j is not None))

    def item_of(self, buyer: int) -> int | None:
        for i, j in self.pairs:
            if i == buyer:
                return j
        return None

    def buyer_of(self, item: int) -> int | None:
        for i, j in self.pairs:
            if j == item:
                return i
        return None

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.pairs)


@dataclass(frozen=True)
class BundleAllocation:
    winners: frozenset[int] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "winners", frozenset(self.winners))

    def __len__(self):
        return len(self.winners)

    def __iter__(self):
        return iter(sorted(self.winners))


Allocation = Union[Matching, BundleAllocation]


@dataclass(frozen=True)
class PriceVector:
    prices: tuple[Fraction, ...]

    def __post_init__(self):
        prices = tuple(Fraction(p) for p in self.prices)
        for j, p in enumerate(prices):
            if p < 0:
                raise InstanceError(f"prices[{j}]", f"negative price {p}")
        object.__setattr__(self, "prices", prices)

    @classmethod
    def zeros(cls, n_items: int) -> "PriceVector":
        return cls((Fraction(0),) * n_items)

    @property
    def total(self) -> Fraction:
        return sum(self.prices, Fraction(0))

    def __len__(self):
        return len(self.prices)

    def __getitem__(self, j):
        return self.prices[j]

    def __iter__(self):
        return iter(self.prices)


@dataclass(frozen=True)
class MechanismOutcome:
    allocation: Allocation
    payments: tuple[Fraction, ...]
    revenue: Fraction = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        payments = tuple(Fraction(p) for p in self.payments)
        object.__setattr__(self, "payments", payments)
        total = sum(payments, Fraction(0))
        if self.revenue is None:
            object.__setattr__(self, "revenue", total)
        elif Fraction(self.revenue) != total:
            raise InstanceError("revenue", f"{self.revenue} != sum of payments {total}")
        if isinstance(self.allocation, Matching):
            served = {i for i, _ in self.allocation.pairs}
        else:
            served = set(self.allocation.winners)
        for i, p in enumerate(payments):
            if i not in served and p != 0:
                raise InstanceError(f"payments[{i}]", "unallocated buyer has nonzero payment")


# -- validation ---------------------------------------------------------------


def validate(instance: Instance) -> list[str]:
    """Return every invariant violation of ``instance``; empty means valid."""
    if isinstance(instance, MatchingInstance):
        return _validate_matching(instance)
    if isinstance(instance, SingleMindedInstance):
        return _validate_single_minded(instance)
    return [f"unsupported instance type {type(instance).__name__}"]


def _validate_matching(inst: MatchingInstance) -> list[str]:
    out = []
    if inst.n_buyers < 1:
        return ["matrix must have at least one buyer"]
    width = len(inst.values[0])
    if width < 1:
        out.append("matrix must have at least one item")
    for i, row in enumerate(inst.values):
        if len(row) != width:
            out.append(f"row {i} has length {len(row)}, expected {width}")
        for j, v in enumerate(row):
            if not isinstance(v, int) or isinstance(v, bool):
                out.append(f"non-integer value at ({i},{j})")
            elif v < 0:
                out.append(f"negative value at ({i},{j})")
    if inst.n_buyers > MAX_MATCHING_SIDE or width > MAX_MATCHING_SIDE:
        out.append(f"matching instances are limited to {MAX_MATCHING_SIDE} buyers and items")
    return out


def _validate_single_minded(inst: SingleMindedInstance) -> list[str]:
    out = []
    if not 1 <= inst.n_items <= MAX_SINGLE_MINDED_ITEMS:
        out.append(f"n_items must be in 1..{MAX_SINGLE_MINDED_ITEMS}")
    for b, bid in enumerate(inst.bids):
        if not bid.items:
            out.append(f"bid {b}: empty bundle")
        for j in sorted(bid.items):
            if not 0 <= j < inst.n_items:
                out.append(f"bid {b}: item index out of range ({j})")
        if not isinstance(bid.value, int) or isinstance(bid.value, bool):
            out.append(f"bid {b}: non-integer value")
        elif bid.value < 0:
            out.append(f"bid {b}: negative value")
    return out


def check_matching(inst: MatchingInstance, matching: Matching) -> None:
    """Raise if ``matching`` references a buyer or item outside ``inst``."""
    for i, j in matching.pairs:
        if not 0 <= i < inst.n_buyers:
            raise InstanceError("matching", f"buyer index {i} out of range")
        if not 0 <= j < inst.n_items:
            raise InstanceError("matching", f"item index {j} out of range")


# -- rationals ----------------------------------------------------------------


def rational_to_json(x) -> dict[str, int]:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def rational_from_json(doc: Any, path: str = "") -> Fraction:
    if isinstance(doc, int) and not isinstance(doc, bool):
        return Fraction(doc)
    if not isinstance(doc, dict) or set(doc) != {"num", "den"}:
        raise InstanceError(path, 'expected {"num": int, "den": int}')
    num, den = doc["num"], doc["den"]
    if not all(isinstance(v, int) and not isinstance(v, bool) for v in (num, den)):
        raise InstanceError(path, "num and den must be integers")
    if den < 1:
        raise InstanceError(path, "den must be >= 1")
    return Fraction(num, den)


def format_rational(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# -- JSON instance format -----------------------------------------------------


def _int_field(doc, path):
    if not isinstance(doc, int) or isinstance(doc, bool):
        raise InstanceError(path, f"expected integer, got {type(doc).__name__}")
    return doc


def instance_from_doc(doc: Any) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceError("", "instance document must be a JSON object")
    kind = doc.get("type")
    if kind == "matching":
        inst = _matching_from_doc(doc)
    elif kind == "single_minded":
        inst = _single_minded_from_doc(doc)
    else:
        raise InstanceError("type", f"unknown instance type {kind!r}")
    problems = validate(inst)
    if problems:
        raise InstanceError("", "; ".join(problems))
    return inst


def _matching_from_doc(doc):
    rows = doc.get("values")
    if not isinstance(rows, list) or not rows:
        raise InstanceError("values", "expected a nonempty list of rows")
    width = None
    out = []
    for i, row in enumerate(rows):
        if not isinstance(row, list) or not row:
            raise InstanceError(f"values[{i}]", "expected a nonempty list")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise InstanceError(f"values[{i}]", f"row length {len(row)} differs from {width}")
        parsed = []
        for j, v in enumerate(row):
            v = _int_field(v, f"values[{i}][{j}]")
            if v < 0:
                raise InstanceError(f"values[{i}][{j}]", f"negative value {v}")
            parsed.append(v)
        out.append(tuple(parsed))
    return MatchingInstance(tuple(out))


def _single_minded_from_doc(doc):
    n_items = _int_field(doc.get("items"), "items")
    if not 1 <= n_items <= MAX_SINGLE_MINDED_ITEMS:
        raise InstanceError("items", f"must be in 1..{MAX_SINGLE_MINDED_ITEMS}")
    bids = doc.get("bids")
    if not isinstance(bids, list):
        raise InstanceError("bids", "expected a list")
    out = []
    for b, bid in enumerate(bids):
        if not isinstance(bid, dict):
            raise InstanceError(f"bids[{b}]", "expected an object")
        bundle = bid.get("bundle")
        if not isinstance(bundle, list) or not bundle:
            raise InstanceError(f"bids[{b}].bundle", "expected a nonempty list")
        items = set()
        for k, label in enumerate(bundle):
            label = _int_field(label, f"bids[{b}].bundle[{k}]")
            if not 1 <= label <= n_items:
                raise InstanceError(f"bids[{b}].bundle[{k}]", f"item index out of range ({label})")
            items.add(label - 1)
        value = _int_field(bid.get("value"), f"bids[{b}].value")
        if value < 0:
            raise InstanceError(f"bids[{b}].value", f"negative value {value}")
        out.append(Bid(frozenset(items), value))
    return SingleMindedInstance(n_items, tuple(out))


def instance_to_doc(inst: Instance) -> dict:
    if isinstance(inst, MatchingInstance):
        return {"type": "matching", "values": [list(row) for row in inst.values]}
    return {
        "type": "single_minded",
        "items": inst.n_items,
        "bids": [{"bundle": [j + 1 for j in sorted(b.items)], "value": b.value} for b in inst.bids],
    }


def parse_instance(text: str) -> Instance:
    """Parse a JSON instance document; raises :class:`InstanceError` with a field path."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError("", f"malformed JSON: {exc}") from None
    return instance_from_doc(doc)


def serialize_instance(inst: Instance) -> str:
    return json.dumps(instance_to_doc(inst), separators=(",", ":"))


def buyer_label(i: int) -> str:
    """Letter labels A, B, C... for the first 26 buyers, then numbers."""
    return chr(ord("A") + i) if i < 26 else str(i + 1)


def iter_buyers(inst: Instance, excluded: Iterable[int] = ()) -> list[int]:
    skip = set(excluded)
    return [i for i in range(inst.n_buyers) if i not in skip]
