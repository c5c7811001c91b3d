import pytest
from hypothesis import given, settings, strategies as st

from srslearn import InputError, SimulatedTeacher, isomorphic, minimize
from srslearn.generators import bitadd_dfa, decode_bits, random_dfa

import oracles as bf
from oracles import AB, A, accept_all, parity_a, toggle_mealy


def test_membership_examples():
    assert SimulatedTeacher(accept_all(AB)).membership(("a", "b"))
    assert not SimulatedTeacher(parity_a()).membership(("a",))
    t = SimulatedTeacher(bitadd_dfa())
    w = ("(1,0,1)", "(1,1,0)")
    # LSB first: x = 3, y = 2, z = 1
    bits = [decode_bits(s) for s in w]
    x, y, z = (sum(b[i] << k for k, b in enumerate(bits)) for i in range(3))
    assert t.membership(w) is False and (x + y == z) is False
    assert t.stats.mq_asked == 1


def test_equivalence_examples():
    t = SimulatedTeacher(parity_a())
    assert t.equivalence(parity_a()) is None
    assert t.equivalence(accept_all()) == ("a",)
    assert t.stats.eq_asked == 2


@settings(max_examples=80, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 10**6))
def test_counterexamples_disagree_and_yes_iff_isomorphic(n1, n2, seed):
    target = random_dfa(n1, AB, 0.4, seed=seed)
    h = random_dfa(n2, AB, 0.4, seed=seed + 1)
    t = SimulatedTeacher(target)
    cex = t.equivalence(h)
    assert (cex is None) == isomorphic(minimize(h), minimize(target))
    if cex is not None:
        assert bf.member(h, cex) != bf.member(target, cex)


def test_counts_equal_calls():
    t = SimulatedTeacher(parity_a())
    for w in bf.words_upto("a", 4):
        t.membership(w)
    assert t.stats.mq_asked == 5


def test_shadow_verify_is_uncounted():
    t = SimulatedTeacher(parity_a(), shadow_mode=True)
    assert t.verify(("a",), False)
    assert not t.verify(("a",), True)
    assert t.stats.mq_asked == 0 and t.verified == 2
    assert t.mismatches == [("membership", ("a",), True)]
    assert t.verify_counterexample(accept_all(), ("a",))
    assert not t.verify_counterexample(parity_a(), ("a",))


def test_mealy_teacher():
    t = SimulatedTeacher(toggle_mealy())
    assert t.last_output(("a", "a")) == "1"
    with pytest.raises(InputError):
        SimulatedTeacher(parity_a()).last_output(("a",))
    with pytest.raises(InputError):
        SimulatedTeacher("not an automaton")
