import pytest
from hypothesis import given, strategies as st

from foliage.errors import BadIndexValueError, BettiShapeError, OddDegreeNonzeroError
from foliage.hopf_ledger import (
    CriticalRecord,
    chi_preset,
    hopf_sum,
    lower_bound_check,
    simple_form_check,
    verify,
)

EXAMPLE1 = [(1, 1), (1, 1), (-1, 0)]
EXAMPLE2 = [(1, 1), (-1, -1)]

records = st.lists(st.tuples(st.sampled_from([-1, 1]), st.integers(-5, 5)), max_size=8)


def test_hopf_sums():
    assert hopf_sum(EXAMPLE1) == 2
    assert hopf_sum(EXAMPLE2) == 2
    assert hopf_sum([]) == 0


def test_verify_verdicts():
    assert verify(EXAMPLE1, 2).verdict == "match"
    assert verify(EXAMPLE2, 2).verdict == "match"
    rep = verify([(1, 1)], 2)
    assert rep.verdict == "mismatch" and not rep.ok
    assert verify(EXAMPLE1, None).verdict == "unverified"


def test_report_dict():
    rep = verify([CriticalRecord("north", 1, 1), CriticalRecord("equator", -1, 0)], 1)
    d = rep.as_dict()
    assert d["hopf_sum"] == 1
    assert d["leaf_closures"][1] == {"label": "equator", "index": -1, "chi_b_twisted": 0, "contribution": 0}


def test_bad_index():
    with pytest.raises(BadIndexValueError):
        CriticalRecord("x", 0, 1)
    with pytest.raises(BadIndexValueError):
        hopf_sum([(2, 1)])


def test_simple_form():
    assert simple_form_check([(1, 1), (1, 1)]) == 2
    assert simple_form_check(EXAMPLE2) is None
    assert simple_form_check([]) == 0


def test_presets():
    assert chi_preset("point") == 1
    assert chi_preset("irrational_torus") == 0
    with pytest.raises(ValueError):
        chi_preset("klein")


def test_lower_bound():
    assert lower_bound_check([1, 0, 0, 0, 1]) == 2
    assert lower_bound_check([1, 0, 3, 0, 1]) == 5
    with pytest.raises(OddDegreeNonzeroError):
        lower_bound_check([1, 1, 0, 0, 1])
    with pytest.raises(BettiShapeError):
        lower_bound_check([1, 0, 0])  # endpoints disagree
    with pytest.raises(BettiShapeError):
        lower_bound_check([1, 0, 0, 1])


@given(records, st.randoms(use_true_random=False))
def test_reordering_invariance(recs, rnd):
    shuffled = list(recs)
    rnd.shuffle(shuffled)
    assert hopf_sum(shuffled) == hopf_sum(recs)


@given(records)
def test_negation(recs):
    assert hopf_sum([(-i, c) for i, c in recs]) == -hopf_sum(recs)


@given(records)
def test_self_verification(recs):
    assert verify(recs, hopf_sum(recs)).verdict == "match"
