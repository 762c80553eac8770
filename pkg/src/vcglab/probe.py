"""Revenue-monotonicity probing.

Raise one value, recompute revenue, and search grids of small instances for
cases where revenue strictly drops.
"""

from __future__ import annotations

import itertools
import json
import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Bid,
    Instance,
    InstanceError,
    MatchingInstance,
    SingleMindedInstance,
    instance_to_doc,
    rational_to_json,
)
from .vcg import run_vcg
from .walrasian import max_walrasian, min_walrasian

MECHANISMS = ("vcg", "min-walrasian", "max-walrasian")
DEFAULT_BUDGET = 10_000_000


class BudgetExceeded(RuntimeError):
    pass


class MechanismMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Perturbation:
    """Raise ``buyer``'s value by ``delta``; ``target`` is an item, or None for a single-minded bid."""

    buyer: int
    target: int | None
    delta: int

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")

    def to_doc(self) -> dict:
        return {
            "buyer": self.buyer + 1,
            "target": "bundle" if self.target is None else self.target + 1,
            "delta": self.delta,
        }


@dataclass(frozen=True)
class MonotonicityWitness:
    instance: Instance
    perturbation: Perturbation
    mechanism: str
    revenue_before: Fraction
    revenue_after: Fraction

    def __post_init__(self):
        if not self.revenue_after < self.revenue_before:
            raise ValueError("a witness needs revenue to strictly decrease")

    def to_doc(self) -> dict:
        return {
            "instance": instance_to_doc(self.instance),
            "perturbation": self.perturbation.to_doc(),
            "mechanism": self.mechanism,
            "revenue_before": rational_to_json(self.revenue_before),
            "revenue_after": rational_to_json(self.revenue_after),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_doc(), separators=(",", ":"))


def apply(inst: Instance, pert: Perturbation) -> Instance:
    """Copy of ``inst`` with the targeted value raised by ``pert.delta``."""
    if not 0 <= pert.buyer < inst.n_buyers:
        raise InstanceError("perturbation.buyer", f"buyer {pert.buyer} out of range")
    if isinstance(inst, MatchingInstance):
        if pert.target is None or not 0 <= pert.target < inst.n_items:
            raise InstanceError("perturbation.target", f"item {pert.target} out of range")
        rows = [list(r) for r in inst.values]
        rows[pert.buyer][pert.target] += pert.delta
        return MatchingInstance(tuple(tuple(r) for r in rows))
    if pert.target is not None:
        raise InstanceError("perturbation.target", "single-minded bids can only raise their own bundle")
    bids = list(inst.bids)
    old = bids[pert.buyer]
    bids[pert.buyer] = Bid(old.items, old.value + pert.delta)
    return SingleMindedInstance(inst.n_items, tuple(bids))


def mechanism_revenue(inst: Instance, mechanism: str) -> Fraction:
    if mechanism == "vcg":
        return run_vcg(inst).revenue
    if mechanism not in MECHANISMS:
        raise MechanismMismatch(f"unknown mechanism {mechanism!r}")
    if not isinstance(inst, MatchingInstance):
        raise MechanismMismatch(f"{mechanism} requires a matching instance")
    solve = min_walrasian if mechanism == "min-walrasian" else max_walrasian
    prices, _ = solve(inst)
    return prices.total


def revenue_delta(inst: Instance, pert: Perturbation, mechanism: str) -> tuple[Fraction, Fraction]:
    """(revenue before, revenue after) applying ``pert``."""
    before = mechanism_revenue(inst, mechanism)
    return before, mechanism_revenue(apply(inst, pert), mechanism)


# -- grids --------------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """Exact-size grid: n buyers (or bids), m items, values 0..vmax, deltas 1..dmax."""

    n: int
    m: int
    vmax: int
    dmax: int = 1
    kind: str = "matching"

    def __post_init__(self):
        if self.n < 1 or self.m < 1 or self.vmax < 0 or self.dmax < 1:
            raise ValueError("grid needs n, m, dmax >= 1 and vmax >= 0")
        if self.kind not in ("matching", "single_minded"):
            raise ValueError(f"unknown grid kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        """Parse ``"n=2,m=2,vmax=2,dmax=2"`` (``kind=single_minded`` optional)."""
        fields = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            key, sep, val = part.partition("=")
            if not sep:
                raise ValueError(f"bad grid field {part!r}")
            key = key.strip()
            if key not in ("n", "m", "vmax", "dmax", "kind"):
                raise ValueError(f"unknown grid field {key!r}")
            fields[key] = val.strip() if key == "kind" else int(val)
        missing = {"n", "m", "vmax"} - set(fields)
        if missing:
            raise ValueError(f"grid is missing {', '.join(sorted(missing))}")
        return cls(**fields)

    def _bundles(self):
        return [
            frozenset(j for j in range(self.m) if mask >> j & 1) for mask in range(1, 1 << self.m)
        ]

    def n_instances(self) -> int:
        if self.kind == "matching":
            return (self.vmax + 1) ** (self.n * self.m)
        return ((2**self.m - 1) * (self.vmax + 1)) ** self.n

    def perturbations(self) -> list[Perturbation]:
        targets = range(self.m) if self.kind == "matching" else [None]
        return [
            Perturbation(i, t, d)
            for i in range(self.n)
            for t in targets
            for d in range(1, self.dmax + 1)
        ]

    def instances(self):
        if self.kind == "matching":
            for flat in itertools.product(range(self.vmax + 1), repeat=self.n * self.m):
                yield MatchingInstance(
                    tuple(flat[i * self.m : (i + 1) * self.m] for i in range(self.n))
                )
        else:
            bids = [Bid(b, v) for b in self._bundles() for v in range(self.vmax + 1)]
            for combo in itertools.product(bids, repeat=self.n):
                yield SingleMindedInstance(self.m, combo)

    def sample(self, rng: random.Random) -> Instance:
        if self.kind == "matching":
            return MatchingInstance(
                tuple(
                    tuple(rng.randint(0, self.vmax) for _ in range(self.m)) for _ in range(self.n)
                )
            )
        bundles = self._bundles()
        return SingleMindedInstance(
            self.m,
            tuple(Bid(rng.choice(bundles), rng.randint(0, self.vmax)) for _ in range(self.n)),
        )


# -- canonical form -----------------------------------------------------------


def canonical_key(inst: Instance, pert: Perturbation) -> tuple:
    if isinstance(inst, MatchingInstance):
        return (inst.values, pert.buyer, -1 if pert.target is None else pert.target, pert.delta)
    bids = tuple((tuple(sorted(b.items)), b.value) for b in inst.bids)
    return (bids, pert.buyer, -1, pert.delta)


def canonicalize(inst: Instance, pert: Perturbation) -> tuple[Instance, Perturbation]:
    """Relabel buyers and items to the lexicographically smallest equivalent witness."""
    best = None
    for bperm in itertools.permutations(range(inst.n_buyers)):
        for iperm in itertools.permutations(range(inst.n_items)):
            # bperm[new] = old buyer, iperm[new] = old item
            if isinstance(inst, MatchingInstance):
                vals = tuple(
                    tuple(inst.values[bperm[a]][iperm[b]] for b in range(inst.n_items))
                    for a in range(inst.n_buyers)
                )
                cand = MatchingInstance(vals)
                new_target = iperm.index(pert.target)
            else:
                inv = {old: new for new, old in enumerate(iperm)}
                cand = SingleMindedInstance(
                    inst.n_items,
                    tuple(
                        Bid(frozenset(inv[j] for j in inst.bids[bperm[a]].items), inst.bids[bperm[a]].value)
                        for a in range(inst.n_buyers)
                    ),
                )
                new_target = None
            cp = Perturbation(bperm.index(pert.buyer), new_target, pert.delta)
            key = canonical_key(cand, cp)
            if best is None or key < best[0]:
                best = (key, cand, cp)
    return best[1], best[2]


# -- search -------------------------------------------------------------------


def _scan(args):
    instances, perts, mechanism = args
    found = []
    for inst in instances:
        before = mechanism_revenue(inst, mechanism)
        if before == 0:
            continue
        for pert in perts:
            after = mechanism_revenue(apply(inst, pert), mechanism)
            if after < before:
                found.append((inst, pert))
    return found


def _ensure_applicable(space: GridSpec, mechanism: str):
    if mechanism not in MECHANISMS:
        raise MechanismMismatch(f"unknown mechanism {mechanism!r}")
    if space.kind != "matching" and mechanism != "vcg":
        raise MechanismMismatch(f"{mechanism} requires a matching grid")


def _finalize(hits, mechanism) -> list[MonotonicityWitness]:
    unique = {}
    for inst, pert in hits:
        c_inst, c_pert = canonicalize(inst, pert)
        before, after = revenue_delta(c_inst, c_pert, mechanism)
        if not after < before:
            # Revenue can depend on tie-breaking among welfare optima; keep the original labels.
            c_inst, c_pert = inst, pert
            before, after = revenue_delta(c_inst, c_pert, mechanism)
            if not after < before:
                continue
        key = canonical_key(c_inst, c_pert)
        if key not in unique:
            unique[key] = MonotonicityWitness(c_inst, c_pert, mechanism, before, after)
    return [unique[k] for k in sorted(unique)]


def search(
    space: GridSpec,
    mechanism: str,
    mode: str = "exhaustive",
    seed: int = 0,
    trials: int = 1000,
    budget: int = DEFAULT_BUDGET,
    workers: int = 1,
) -> list[MonotonicityWitness]:
    """Revenue-decrease witnesses over ``space``, canonicalized, deduplicated and sorted.

    ``mode`` is ``"exhaustive"`` or ``"random"``; random mode draws ``trials``
    (instance, perturbation) pairs from ``random.Random(seed)``. Every witness
    is recomputed from scratch before it is returned.
    """
    _ensure_applicable(space, mechanism)
    perts = space.perturbations()
    if mode == "exhaustive":
        cost = space.n_instances() * len(perts)
        if cost > budget:
            raise BudgetExceeded(f"{cost} evaluations exceed the budget of {budget}")
        instances = list(space.instances())
        if workers > 1 and len(instances) > 1:
            size = -(-len(instances) // (workers * 4))
            chunks = [(instances[k : k + size], perts, mechanism) for k in range(0, len(instances), size)]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                hits = [h for part in pool.map(_scan, chunks) for h in part]
        else:
            hits = _scan((instances, perts, mechanism))
    elif mode == "random":
        if trials > budget:
            raise BudgetExceeded(f"{trials} trials exceed the budget of {budget}")
        rng = random.Random(seed)
        hits = []
        for _ in range(trials):
            inst = space.sample(rng)
            pert = rng.choice(perts)
            before, after = revenue_delta(inst, pert, mechanism)
            if after < before:
                hits.append((inst, pert))
    else:
        raise ValueError(f"unknown search mode {mode!r}")
    return _finalize(hits, mechanism)


def default_workers() -> int:
    env = os.environ.get("VCGLAB_WORKERS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1
