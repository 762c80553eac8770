"""VCG outcomes with Clarke-pivot (externality) payments."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import Instance, MechanismOutcome
from .validation import check_instance
from .welfare import buyer_value, max_welfare


@dataclass(frozen=True)
class VcgOutcome:
    outcome: MechanismOutcome
    welfare: int

    @property
    def allocation(self):
        return self.outcome.allocation

    @property
    def payments(self) -> tuple[Fraction, ...]:
        return self.outcome.payments

    @property
    def per_buyer_externality(self) -> tuple[Fraction, ...]:
        return self.outcome.payments

    @property
    def revenue(self) -> Fraction:
        return self.outcome.revenue


def run_vcg(inst: Instance) -> VcgOutcome:
    """Welfare-optimal allocation; buyer i pays W(others without i) - W(others with i)."""
    inst = check_instance(inst)
    best = max_welfare(inst)
    payments = []
    for i in range(inst.n_buyers):
        own = buyer_value(inst, best.allocation, i)
        if own == 0 and not _served(best.allocation, i):
            payments.append(Fraction(0))
            continue
        without = max_welfare(inst, excluded=(i,)).best_value
        payments.append(Fraction(without - (best.best_value - own)))
    return VcgOutcome(MechanismOutcome(best.allocation, tuple(payments)), best.best_value)


def _served(allocation, buyer: int) -> bool:
    if hasattr(allocation, "winners"):
        return buyer in allocation.winners
    return allocation.item_of(buyer) is not None


def revenue(outcome: VcgOutcome | MechanismOutcome) -> Fraction:
    payments = outcome.payments
    return sum(payments, Fraction(0))
