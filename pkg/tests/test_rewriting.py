import pytest
from hypothesis import given, settings, strategies as st

from srslearn import (
    Alphabet,
    ControlledRule,
    Csrs,
    InputError,
    NonTerminationError,
    RewriteRule,
    SplitMix64,
    Srs,
    check_convergence,
    csrs_normal_form,
    normal_form,
    single_step,
    word,
)
from srslearn.generators import bin_srs
from srslearn.nfa import EmptySet, Epsilon, sigma_star
from srslearn.rewriting import (
    Status,
    critical_pairs,
    csrs_single_step,
    normal_form_with_trace,
    random_normal_form,
    replay,
)

import oracles as bf
from oracles import AB, A

ABC = Alphabet(tuple("abc"))


def srs(text_rules, alphabet=AB, **kw):
    return Srs(alphabet, tuple(RewriteRule(word(l), word(r)) for l, r in text_rules), **kw)


# -- single steps ------------------------------------------------------------------------

def test_single_step_examples():
    assert single_step(srs([("a a", "a")], A), word("a a a")) == {word("a a")}
    assert single_step(Srs(AB, ()), word("a b")) == frozenset()
    assert single_step(srs([("b a", "a b")]), word("b a b")) == {word("a b b")}


def test_rule_validation():
    with pytest.raises(InputError):
        RewriteRule(word("a"), word("a"))
    with pytest.raises(InputError):
        srs([("", "a")])  # empty lhs needs a one-sided system
    assert srs([("", "a")], one_sided=True).rules[0].lhs == ()
    with pytest.raises(InputError):
        srs([("a", "z")])


rule_lists = st.lists(
    st.tuples(st.lists(st.sampled_from("ab"), min_size=1, max_size=2),
              st.lists(st.sampled_from("ab"), max_size=2)).filter(lambda p: p[0] != p[1]),
    max_size=3)


@settings(max_examples=150, deadline=None)
@given(rule_lists, st.lists(st.sampled_from("ab"), max_size=6))
def test_single_step_matches_brute_force(rules, w):
    r = Srs(AB, tuple(RewriteRule(tuple(l), tuple(x)) for l, x in rules))
    expected = {y for _, _, y in bf.one_steps(rules, w)}
    got = single_step(r, w)
    assert got == expected
    longest = max((len(x) for _, x in rules), default=0)
    assert all(len(y) <= len(w) + longest for y in got)


# -- normal forms ------------------------------------------------------------------------

def test_normal_form_examples():
    assert normal_form(srs([("a a", "a")]), word("b a a b")) == word("b a b")
    assert normal_form(srs([("b a", "a b")]), word("b b a a")) == word("a a b b")
    r = bin_srs()
    assert normal_form(r, ("(1,0,0)", "(1,0,1)")) == ("(0,1,0)", "(0,1,1)")


def test_normal_form_budget():
    loop = srs([("a", "b"), ("b", "a")])
    with pytest.raises(NonTerminationError):
        normal_form(loop, word("a"), step_budget=50)


def test_trace_replays_to_normal_form():
    r = srs([("b a", "a b"), ("a a", "a")])
    w = word("b b a a b a")
    nf, trace = normal_form_with_trace(r, w)
    assert replay(r, w, trace) == nf == normal_form(r, w)


nonincreasing_rules = st.lists(
    st.tuples(st.lists(st.sampled_from("ab"), min_size=1, max_size=2),
              st.lists(st.sampled_from("ab"), max_size=2))
    .filter(lambda p: AB.key(tuple(p[0])) > AB.key(tuple(p[1]))),
    max_size=3)


@settings(max_examples=200, deadline=None)
@given(nonincreasing_rules, st.lists(st.sampled_from("ab"), max_size=8))
def test_normal_form_is_leftmost_first_and_irreducible(rules, w):
    r = Srs(AB, tuple(RewriteRule(tuple(l), tuple(x)) for l, x in rules))
    nf = normal_form(r, w)
    assert nf == bf.leftmost_first(rules, w)
    assert single_step(r, nf) == frozenset()


@settings(max_examples=100, deadline=None)
@given(nonincreasing_rules, st.lists(st.sampled_from("ab"), max_size=7), st.integers(0, 2**32))
def test_convergent_systems_are_strategy_independent(rules, w, seed):
    r = Srs(AB, tuple(RewriteRule(tuple(l), tuple(x)) for l, x in rules))
    if check_convergence(r).convergent is not Status.PROVED:
        return
    nfs = bf.normal_forms(lambda x: bf.one_steps(rules, x), w)
    assert nfs == {normal_form(r, w)}
    rng = SplitMix64(seed)
    assert random_normal_form(r, w, rng) == normal_form(r, w)


# -- convergence ------------------------------------------------------------------------

def test_convergence_examples():
    v = check_convergence(srs([("a a", "a")], A))
    assert v.convergent is Status.PROVED
    pairs = list(critical_pairs(srs([("a a", "a")], A)))
    assert (word("a a a"), word("a a"), word("a a")) in pairs
    loop = check_convergence(srs([("a", "b"), ("b", "a")]))
    assert loop.termination is Status.UNKNOWN and loop.convergent is not Status.PROVED
    comm = check_convergence(srs([("b a", "a b")]))
    assert comm.termination is Status.PROVED
    assert comm.local_confluence is Status.PROVED
    assert comm.convergent is Status.PROVED


def test_non_confluent_system_refuted():
    r = srs([("a b", "a"), ("a b", "b")])
    v = check_convergence(r)
    assert v.local_confluence is Status.REFUTED
    w, t1, t2 = v.critical_pair
    assert normal_form(r, t1) != normal_form(r, t2)


@settings(max_examples=150, deadline=None)
@given(nonincreasing_rules)
def test_refuted_verdicts_are_real(rules):
    r = Srs(AB, tuple(RewriteRule(tuple(l), tuple(x)) for l, x in rules))
    v = check_convergence(r)
    if v.local_confluence is Status.REFUTED:
        w, _, _ = v.critical_pair
        assert len(bf.normal_forms(lambda x: bf.one_steps(rules, x), w)) > 1
    if v.convergent is Status.PROVED:
        for w in bf.words_upto("ab", 5):
            assert len(bf.normal_forms(lambda x: bf.one_steps(rules, x), w)) == 1


# -- controlled systems --------------------------------------------------------------------

def test_csrs_single_step_examples():
    top = sigma_star(AB)
    c = Csrs(AB, (ControlledRule(word("a a"), word("a"), Epsilon(), top),))
    assert csrs_single_step(c, word("a a b")) == {word("a b")}
    assert csrs_single_step(c, word("b a a")) == frozenset()
    never = Csrs(AB, (ControlledRule(word("a a"), word("a"), top, EmptySet()),))
    assert csrs_single_step(never, word("a a a")) == frozenset()
    rb = Csrs(AB, (ControlledRule(word("b"), (), Epsilon(), top),
                   ControlledRule(word("a a"), word("a"), Epsilon(), top),
                   ControlledRule(word("a b"), word("a"), Epsilon(), top)))
    assert csrs_single_step(rb, word("b a")) == {word("a")}


def test_csrs_normal_form_examples():
    top = sigma_star(AB)
    rb = Csrs(AB, (ControlledRule(word("b"), (), Epsilon(), top),
                   ControlledRule(word("a a"), word("a"), Epsilon(), top),
                   ControlledRule(word("a b"), word("a"), Epsilon(), top)))
    assert csrs_normal_form(rb, word("b b a")) == word("a")
    assert csrs_normal_form(Csrs(AB, ()), word("b a b")) == word("b a b")
    plain = srs([("b a", "a b"), ("a a", "a")])
    for w in bf.words_upto("ab", 5):
        assert csrs_normal_form(Csrs.from_srs(plain), w) == normal_form(plain, w)


contexts = st.sampled_from([Epsilon(), EmptySet(), sigma_star(AB),
                            sigma_star(AB) * sigma_star(AB)])


@settings(max_examples=150, deadline=None)
@given(st.lists(st.tuples(st.lists(st.sampled_from("ab"), min_size=1, max_size=2),
                          st.lists(st.sampled_from("ab"), max_size=2), contexts, contexts)
                .filter(lambda p: p[0] != p[1]), max_size=3),
       st.lists(st.sampled_from("ab"), max_size=5))
def test_csrs_single_step_matches_brute_force(rules, w):
    c = Csrs(AB, tuple(ControlledRule(tuple(l), tuple(r), ex, ey) for l, r, ex, ey in rules))
    expected = {y for _, _, y in bf.controlled_steps(rules, w)}
    assert csrs_single_step(c, w) == expected


def test_csrs_convergence_criteria():
    top = sigma_star(AB)
    anchored = Csrs(AB, (ControlledRule(word("b"), (), Epsilon(), top),
                         ControlledRule(word("a a"), word("a"), Epsilon(), top)))
    assert check_convergence(anchored).convergent is Status.PROVED
    overlapping = Csrs(AB, (ControlledRule(word("a"), (), Epsilon(), top),
                            ControlledRule(word("a b"), word("b"), Epsilon(), top)))
    assert check_convergence(overlapping).convergent is Status.UNKNOWN
    assert check_convergence(Csrs.from_srs(srs([("a a", "a")]))).convergent is Status.PROVED
