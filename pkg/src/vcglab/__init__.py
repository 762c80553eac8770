"""Exact VCG, Walrasian and posted-price computations for small markets."""

from .core import (
    Bid,
    BundleAllocation,
    InstanceError,
    Matching,
    MatchingInstance,
    MechanismOutcome,
    PriceVector,
    SingleMindedInstance,
    parse_instance,
    serialize_instance,
    validate,
)
from .estimators import PostedPricer, VCGAuction, WalrasianPricer
from .pricing import TypeDistribution, buyer_choice, max_posted_revenue
from .probe import GridSpec, MonotonicityWitness, Perturbation, apply, revenue_delta, search
from .vcg import VcgOutcome, revenue, run_vcg
from .walrasian import check_walrasian, max_walrasian, min_walrasian, oracle_walrasian_set
from .welfare import (
    WelfareResult,
    max_welfare_matching,
    max_welfare_single_minded,
    oracle_enumerate_matchings,
)

__version__ = "0.1.0"
