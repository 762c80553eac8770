import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from vcglab.core import (
    Bid,
    InstanceError,
    Matching,
    MatchingInstance,
    MechanismOutcome,
    PriceVector,
    SingleMindedInstance,
    format_rational,
    parse_instance,
    rational_from_json,
    rational_to_json,
    serialize_instance,
    validate,
)

AM06_TEXT = (
    '{"type":"single_minded","items":2,"bids":[{"bundle":[1],"value":1},'
    '{"bundle":[2],"value":0},{"bundle":[1,2],"value":1}]}'
)


def test_parse_matching():
    inst = parse_instance('{"type":"matching","values":[[2,0],[1,0]]}')
    assert inst == MatchingInstance(((2, 0), (1, 0)))
    assert (inst.n_buyers, inst.n_items) == (2, 2)


def test_parse_minimal():
    inst = parse_instance('{"type":"matching","values":[[0]]}')
    assert inst.values == ((0,),)


def test_parse_single_minded_uses_one_based_items():
    inst = parse_instance(AM06_TEXT)
    assert inst == SingleMindedInstance(
        2, (Bid(frozenset({0}), 1), Bid(frozenset({1}), 0), Bid(frozenset({0, 1}), 1))
    )
    assert inst.bids[2].mask == 0b11


@pytest.mark.parametrize(
    "text, path",
    [
        ('{"type":"matching","values":[[1,-1]]}', "values[0][1]"),
        ('{"type":"matching","values":[[1,2],[3]]}', "values[1]"),
        ('{"type":"matching","values":[[1,"x"]]}', "values[0][1]"),
        ('{"type":"single_minded","items":2,"bids":[{"bundle":[3],"value":1}]}', "bids[0].bundle[0]"),
        ('{"type":"single_minded","items":2,"bids":[{"bundle":[1],"value":-2}]}', "bids[0].value"),
        ('{"type":"single_minded","items":2,"bids":[{"bundle":[],"value":1}]}', "bids[0].bundle"),
        ('{"type":"auction"}', "type"),
    ],
)
def test_parse_errors_carry_path(text, path):
    with pytest.raises(InstanceError) as info:
        parse_instance(text)
    assert info.value.path == path


def test_parse_malformed_json():
    with pytest.raises(InstanceError, match="malformed"):
        parse_instance("{not json")


def test_validate_examples():
    assert validate(MatchingInstance(((2, 0), (1, 0)))) == []
    assert validate(MatchingInstance(((-1, 0),))) == ["negative value at (0,0)"]
    bad = SingleMindedInstance(2, (Bid(frozenset({5}), 1),))
    assert any("item index out of range" in v for v in validate(bad))


def test_validate_size_limits():
    wide = MatchingInstance((tuple(range(17)),))
    assert validate(wide)
    assert validate(SingleMindedInstance(31, (Bid(frozenset({0}), 1),)))


def test_matching_rejects_shared_item():
    with pytest.raises(InstanceError):
        Matching(((0, 1), (1, 1)))
    m = Matching.from_items([1, None, 0])
    assert m.pairs == ((0, 1), (2, 0))
    assert m.item_of(1) is None and m.buyer_of(0) == 2


def test_price_vector_nonnegative():
    with pytest.raises(InstanceError):
        PriceVector((Fraction(-1),))
    assert PriceVector((1, Fraction(1, 2))).total == Fraction(3, 2)


def test_outcome_revenue_is_sum_of_payments():
    out = MechanismOutcome(Matching(((0, 0),)), (Fraction(1), Fraction(0)))
    assert out.revenue == 1
    with pytest.raises(InstanceError):
        MechanismOutcome(Matching(((0, 0),)), (1, 0), revenue=Fraction(2))
    with pytest.raises(InstanceError):
        MechanismOutcome(Matching(((0, 0),)), (0, 1))


def test_rational_json():
    assert rational_to_json(Fraction(2, 4)) == {"num": 1, "den": 2}
    assert rational_from_json({"num": 3, "den": 6}) == Fraction(1, 2)
    with pytest.raises(InstanceError):
        rational_from_json({"num": 1, "den": 0})
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(1, 2)) == "1/2"


matching_instances = st.integers(1, 5).flatmap(
    lambda m: st.lists(st.lists(st.integers(0, 50), min_size=m, max_size=m), min_size=1, max_size=5)
).map(lambda rows: MatchingInstance(tuple(tuple(r) for r in rows)))


@st.composite
def single_minded_instances(draw):
    m = draw(st.integers(1, 8))
    bids = draw(
        st.lists(
            st.tuples(st.frozensets(st.integers(0, m - 1), min_size=1), st.integers(0, 50)),
            max_size=6,
        )
    )
    return SingleMindedInstance(m, tuple(Bid(b, v) for b, v in bids))


@given(st.one_of(matching_instances, single_minded_instances()))
def test_round_trip(inst):
    assert validate(inst) == []
    text = serialize_instance(inst)
    again = parse_instance(text)
    assert again == inst
    assert validate(again) == []
    assert json.loads(text)["type"] in ("matching", "single_minded")
