"""scikit-learn style wrappers around the mechanism functions.

``fit`` takes a market (instance object, JSON-style dict, or value matrix)
and stores the outcome in trailing-underscore attributes. ``predict`` maps
rows of buyer values to the item each buyer would demand at the fitted
prices.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .core import MatchingInstance
from .pricing import DEFAULT_BUDGET, TypeDistribution, buyer_choice, max_posted_revenue
from .validation import check_instance, check_values
from .vcg import run_vcg
from .walrasian import max_walrasian, min_walrasian


def _demand(X, prices) -> np.ndarray:
    rows = check_values(X)
    for r, row in enumerate(rows):
        if len(row) != len(prices):
            raise ValueError(f"row {r} has {len(row)} values, expected {len(prices)}")
    out = [buyer_choice(row, prices) for row in rows]
    return np.array([-1 if c is None else c for c in out], dtype=np.intp)


class VCGAuction(BaseEstimator):
    """Run VCG on a matching or single-minded market.

    Attributes
    ----------
    allocation_ : Matching or BundleAllocation
    payments_ : tuple of Fraction, one per buyer
    revenue_ : Fraction
    welfare_ : int
    """

    def fit(self, X, y=None):
        inst = check_instance(X)
        result = run_vcg(inst)
        self.instance_ = inst
        self.allocation_ = result.allocation
        self.payments_ = result.payments
        self.revenue_ = result.revenue
        self.welfare_ = result.welfare
        return self


class WalrasianPricer(BaseEstimator):
    """Extreme Walrasian prices of a matching market.

    Parameters
    ----------
    extreme : {"min", "max"}
        Which end of the equilibrium price lattice to compute. ``"min"``
        coincides with VCG payments.
    """

    def __init__(self, extreme="min"):
        self.extreme = extreme

    def fit(self, X, y=None):
        if self.extreme not in ("min", "max"):
            raise ValueError(f"extreme must be 'min' or 'max', got {self.extreme!r}")
        inst = check_instance(X)
        if not isinstance(inst, MatchingInstance):
            raise ValueError("WalrasianPricer requires a matching market")
        solve = min_walrasian if self.extreme == "min" else max_walrasian
        prices, matching = solve(inst)
        self.prices_ = prices
        self.matching_ = matching
        self.revenue_ = prices.total
        self.n_items_ = inst.n_items
        return self

    def predict(self, X):
        """Demanded item per row of values; -1 if the buyer buys nothing."""
        check_is_fitted(self, "prices_")
        return _demand(X, self.prices_.prices)


class PostedPricer(BaseEstimator):
    """Revenue-maximizing posted prices for a single buyer of random type.

    ``fit(X, y)`` reads ``X`` as the type value vectors and ``y`` as their
    probabilities (uniform if omitted). A :class:`TypeDistribution` may be
    passed directly as ``X``.
    """

    def __init__(self, budget=DEFAULT_BUDGET):
        self.budget = budget

    def fit(self, X, y=None):
        if isinstance(X, TypeDistribution):
            dist = X
        else:
            types = check_values(X)
            if y is None:
                probs = (Fraction(1, len(types)),) * len(types)
            else:
                probs = tuple(Fraction(p) for p in y)
            dist = TypeDistribution(types, probs)
        result = max_posted_revenue(dist, budget=self.budget)
        self.prices_ = result.prices
        self.expected_revenue_ = result.expected_revenue
        self.choices_ = result.per_type_choice
        return self

    def predict(self, X):
        check_is_fitted(self, "prices_")
        return _demand(X, self.prices_.prices)
