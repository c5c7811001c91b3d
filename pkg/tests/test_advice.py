import pytest
from hypothesis import given, settings, strategies as st

from srslearn import (
    AdviceError,
    AdviceMode,
    AdvisedTeacher,
    Alphabet,
    ControlledRule,
    Csrs,
    Dfa,
    InputError,
    LearnerConfig,
    MealyMachine,
    NormalFormCache,
    QueryStats,
    RewriteRule,
    SignedCache,
    SimulatedTeacher,
    Srs,
    UnsupportedAdviceError,
    advised_equivalence,
    advised_membership,
    check_consistency,
    check_consistency_csrs,
    check_consistency_mealy,
    check_consistency_one_sided,
    lstar_learn,
    minimize,
    shortest_counterexample,
    single_step,
    upward_closed_infer,
    word,
)
from srslearn.advice import find_witness, is_subsequence
from srslearn.generators import (
    encode_partial_dfa,
    idempotent_srs,
    make_letter_idempotent,
    pattern_dfa,
    prune_transitions,
    random_dfa,
    subsequence_dfa,
    upward_srs,
)
from srslearn.nfa import EmptySet, Epsilon, sigma_star
from srslearn.rewriting import csrs_single_step

import oracles as bf
from oracles import AB, A, accept_all, epsilon_only, parity_a, toggle_mealy

AA_A = Srs(A, (RewriteRule(word("a a"), word("a")),))


def counting(target):
    calls = []

    def mq(w):
        calls.append(tuple(w))
        return bf.member(target, w)
    return mq, calls


# -- advice modes -------------------------------------------------------------------------

def test_mode_requires_matching_system():
    with pytest.raises(InputError):
        AdviceMode.controlled(AA_A)
    with pytest.raises(InputError):
        AdviceMode.two_sided(Csrs.from_srs(AA_A))


def test_non_convergent_membership_advice_rejected():
    loop = Srs(AB, (RewriteRule(("a",), ("b",)), RewriteRule(("b",), ("a",))))
    with pytest.raises(AdviceError):
        AdviceMode.two_sided(loop)
    assert AdviceMode.two_sided(loop, use_membership=False).infers_membership is False
    assert AdviceMode.two_sided(loop, assume_convergent=True).infers_membership


# -- membership ------------------------------------------------------------------------------

def test_membership_cache_by_normal_form():
    target = Dfa(AB, [[0, 0]], 0, {0})
    mode = AdviceMode.two_sided(Srs(AB, (RewriteRule(word("a a"), word("a")),)))
    cache = NormalFormCache()
    mq, calls = counting(target)
    stats = QueryStats()
    advised_membership(mode, cache, mq, word("a a b"), stats)
    assert calls == [word("a a b")] and word("a b") in cache
    advised_membership(mode, cache, mq, word("a b"), stats)
    assert len(calls) == 1
    assert (stats.mq_asked, stats.mq_inferred) == (1, 1)


def test_mode_none_keys_by_word():
    cache = NormalFormCache()
    mq, calls = counting(accept_all(AB))
    for w in [word("a a b"), word("a b"), word("a b")]:
        advised_membership(AdviceMode.none(), cache, mq, w)
    assert calls == [word("a a b"), word("a b")]
    assert set(cache.answers) == {word("a a b"), word("a b")}


def test_upward_inference_examples():
    s = SignedCache(positive=[word("a b")])
    assert upward_closed_infer(s, word("a a b")) is True
    s = SignedCache(negative=[word("a b b")])
    assert upward_closed_infer(s, word("a b")) is False
    assert upward_closed_infer(SignedCache(), word("a")) is None


@settings(max_examples=200, deadline=None)
@given(st.lists(st.lists(st.sampled_from("ab"), max_size=4), max_size=5),
       st.lists(st.sampled_from("ab"), max_size=5), st.lists(st.sampled_from("ab"), max_size=5))
def test_subsequence_and_signed_cache(positives, a, b):
    assert is_subsequence(a, b) == bf.is_subseq(a, b)
    s = SignedCache()
    for p in positives:
        s.add(tuple(p), True)
    # the antichain keeps exactly the upward closure of everything added
    expected = any(bf.is_subseq(p, a) for p in positives) or None
    assert upward_closed_infer(s, a) == expected
    for x in s.positive:
        assert not any(x != y and bf.is_subseq(y, x) for y in s.positive)


def test_upward_cache_answers_for_upward_language():
    target = subsequence_dfa([word("a b")], AB)
    mode = AdviceMode.upward_closed(AB)
    cache = SignedCache()
    mq, calls = counting(target)
    for w in bf.words_upto("ab", 5):
        assert advised_membership(mode, cache, mq, w) == bf.member(target, w)
    assert len(calls) < len(list(bf.words_upto("ab", 5)))


# -- consistency checks ----------------------------------------------------------------------

def test_check_consistency_examples():
    assert check_consistency(AA_A, accept_all()) is None
    w = check_consistency(AA_A, parity_a())
    assert (w.x, w.y, w.prefix, w.suffix) == (word("a a"), word("a"), (), ())
    assert str(w) == "a a / a"
    assert check_consistency(Srs(A, ()), parity_a()) is None


def test_check_consistency_csrs_examples():
    top = sigma_star(A)
    vacuous = Csrs(A, (ControlledRule(word("a a"), word("a"), Epsilon(), EmptySet()),))
    assert check_consistency_csrs(vacuous, parity_a()) is None
    anchored = Csrs(A, (ControlledRule(word("a a"), word("a"), Epsilon(), top),))
    w = check_consistency_csrs(anchored, parity_a())
    assert (w.x, w.y) == (word("a a"), word("a"))


@pytest.mark.parametrize("seed", range(10))
def test_partial_encoding_consistent_with_completion(seed):
    d = minimize(random_dfa(15, AB, 0.3, seed=seed))
    part = prune_transitions(d, min(8, d.n_states * 2), seed)
    assert check_consistency_csrs(encode_partial_dfa(part), d) is None


def test_one_sided_examples():
    up = upward_srs(AB)
    contains_a = pattern_dfa([word("a")], "any", AB)
    assert check_consistency_one_sided(up, contains_a, "positive") is None
    just_a = Dfa.from_dict(AB, {0: {"a": 1, "b": 2}, 1: {"a": 2, "b": 2}, 2: {"a": 2, "b": 2}},
                           0, {1})
    w = check_consistency_one_sided(up, just_a, "positive")
    assert (w.x, w.y) in {(word("a"), word("a a")), (word("a"), word("a b"))}
    for pol in ("positive", "negative"):
        assert check_consistency_one_sided(Srs(AB, ()), just_a, pol) is None
    with pytest.raises(InputError):
        check_consistency_one_sided(up, just_a, "sideways")


def test_mealy_consistency_examples():
    outs = Alphabet(("0", "1"))
    # a leads into an a-fixpoint with stable output
    stable = MealyMachine(A, outs, [[1], [1]], [["1"], ["1"]], 0)
    aa_a = AA_A
    assert check_consistency_mealy(aa_a, stable) is None
    w = check_consistency_mealy(aa_a, toggle_mealy())
    assert w is not None
    assert bf.mealy_last(toggle_mealy(), w.x) != bf.mealy_last(toggle_mealy(), w.y)
    assert check_consistency_mealy(Srs(A, ()), toggle_mealy()) is None
    with pytest.raises(UnsupportedAdviceError):
        check_consistency_mealy(Srs(A, (RewriteRule(("a",), ()),)), toggle_mealy())


# -- brute-force agreement ---------------------------------------------------------------------

@st.composite
def instances(draw):
    k = draw(st.integers(1, 3))
    alphabet = Alphabet(tuple("abc"[:k]))
    n = draw(st.integers(1, 4))
    delta = [[draw(st.integers(0, n - 1)) for _ in range(k)] for _ in range(n)]
    accepting = {q for q in range(n) if draw(st.booleans())}
    letters = st.sampled_from(alphabet.symbols)
    rules = []
    for _ in range(draw(st.integers(0, 3))):
        lhs = tuple(draw(st.lists(letters, min_size=1, max_size=2)))
        rhs = tuple(draw(st.lists(letters, max_size=2)))
        if lhs != rhs:
            rules.append((lhs, rhs))
    return Dfa(alphabet, delta, 0, accepting), rules


def _valid_witness(w, rules, d, step):
    assert w.y in {y for _, _, y in step(rules, w.x)}
    assert bf.member(d, w.x) != bf.member(d, w.y)


@settings(max_examples=150, deadline=None)
@given(instances())
def test_two_sided_checker_matches_brute_force(inst):
    d, rules = inst
    r = Srs(d.alphabet, tuple(RewriteRule(l, x) for l, x in rules))
    w = check_consistency(r, d)
    # with at most 4 states every separating one-step pair is found by length 6
    assert (w is None) == (bf.bf_two_sided(lambda x: bf.one_steps(rules, x), d, 6) is None)
    if w is not None:
        _valid_witness(w, rules, d, bf.one_steps)


@settings(max_examples=150, deadline=None)
@given(instances(), st.sampled_from(["positive", "negative"]))
def test_one_sided_checker_matches_brute_force(inst, polarity):
    d, rules = inst
    r = Srs(d.alphabet, tuple(RewriteRule(l, x) for l, x in rules))
    w = check_consistency_one_sided(r, d, polarity)
    found = bf.bf_one_sided(lambda x: bf.one_steps(rules, x), d, 6, polarity)
    assert (w is None) == (found is None)
    if w is not None:
        assert w.y in {y for _, _, y in bf.one_steps(rules, w.x)}
        mx, my = bf.member(d, w.x), bf.member(d, w.y)
        assert (mx and not my) if polarity == "positive" else (my and not mx)


@settings(max_examples=100, deadline=None)
@given(instances(), st.data())
def test_csrs_checker_matches_brute_force(inst, data):
    d, rules = inst
    alphabet = d.alphabet
    ctx = st.sampled_from([Epsilon(), EmptySet(), sigma_star(alphabet)] +
                          [sigma_star(alphabet) * bf.Sym(s) for s in alphabet])
    crules = [(l, x, data.draw(ctx), data.draw(ctx)) for l, x in rules]
    c = Csrs(alphabet, tuple(ControlledRule(*r) for r in crules))
    w = check_consistency_csrs(c, d)
    found = bf.bf_two_sided(lambda x: bf.controlled_steps(crules, x), d, 6)
    assert (w is None) == (found is None)
    if w is not None:
        _valid_witness(w, crules, d, bf.controlled_steps)


# -- equivalence ---------------------------------------------------------------------------------

def test_advised_equivalence_examples():
    mode = AdviceMode.two_sided(AA_A)
    stats = QueryStats()
    eq_calls = []
    mq, calls = counting(accept_all())
    cex = advised_equivalence(mode, parity_a(), mq, eq_calls.append, stats)
    assert cex == ("a",) and len(calls) == 1 and not eq_calls
    assert (stats.eq_asked, stats.eq_inferred) == (0, 1)

    mq, calls = counting(epsilon_only())
    assert check_consistency(AA_A, epsilon_only()) is None
    assert advised_equivalence(mode, parity_a(), mq, eq_calls.append) == ("a", "a")

    teacher = SimulatedTeacher(accept_all())
    assert advised_equivalence(mode, accept_all(), mq, teacher.equivalence, stats) is None
    assert teacher.stats.eq_asked == 1 and stats.eq_asked == 1


def test_find_witness_mealy_modes():
    with pytest.raises(UnsupportedAdviceError):
        find_witness(AdviceMode.positive(AA_A), toggle_mealy())


# -- shadow soundness through the full layer ------------------------------------------------------

def _learn_shadow(target, mode, config=LearnerConfig()):
    teacher = SimulatedTeacher(target, shadow_mode=True)
    layer = AdvisedTeacher(teacher, mode, shadow=True)
    learned, _ = lstar_learn(layer.membership, layer.equivalence, target.alphabet, config)
    assert shortest_counterexample(learned, target) is None
    assert not teacher.mismatches
    # every query the layer forwarded is one the teacher counted
    assert layer.stats.mq_asked == teacher.stats.mq_asked
    assert layer.stats.eq_asked == teacher.stats.eq_asked
    return layer


@pytest.mark.parametrize("seed", range(6))
def test_shadow_two_sided_and_positive(seed):
    sigma = Alphabet(tuple("abcd"))
    target = minimize(make_letter_idempotent(random_dfa(30, sigma, 0.1, seed=seed), "a"))
    layer = _learn_shadow(target, AdviceMode.two_sided(idempotent_srs(sigma, ("a",))))
    assert layer.stats.mq_inferred > 0
    _learn_shadow(target, AdviceMode.positive(idempotent_srs(sigma, ("a",))))
    _learn_shadow(target, AdviceMode.negative(idempotent_srs(sigma, ("a",))))


@pytest.mark.parametrize("seed", range(6))
def test_shadow_controlled(seed):
    sigma = Alphabet(tuple("abcd"))
    target = minimize(random_dfa(30, sigma, 0.1, seed=seed))
    part = prune_transitions(target, min(15, target.n_states * 4), seed)
    _learn_shadow(target, AdviceMode.controlled(encode_partial_dfa(part)))


@pytest.mark.parametrize("patterns", [["a b"], ["b b a", "a a"], ["a b a b"]])
def test_shadow_upward(patterns):
    target = subsequence_dfa([word(p) for p in patterns], AB)
    layer = _learn_shadow(target, AdviceMode.upward_closed(AB))
    assert layer.teacher.verified > 0


def test_advised_teacher_rejects_alphabet_mismatch():
    with pytest.raises(InputError):
        AdvisedTeacher(SimulatedTeacher(parity_a(AB)), AdviceMode.two_sided(AA_A))


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_mealy_checker_matches_brute_force(data):
    outs = Alphabet(("0", "1"))
    n = data.draw(st.integers(1, 3))
    delta = [[data.draw(st.integers(0, n - 1)) for _ in AB] for _ in range(n)]
    out = [[data.draw(st.sampled_from(outs.symbols)) for _ in AB] for _ in range(n)]
    m = MealyMachine(AB, outs, delta, out, 0)
    side = st.lists(st.sampled_from("ab"), min_size=1, max_size=2).map(tuple)
    rules = [(l, r) for l, r in data.draw(st.lists(st.tuples(side, side), max_size=3)) if l != r]
    w = check_consistency_mealy(Srs(AB, tuple(RewriteRule(l, r) for l, r in rules)), m)
    found = bf.bf_mealy(lambda x: bf.one_steps(rules, x), m, 6)
    assert (w is None) == (found is None)
    if w is not None:
        assert w.y in {y for _, _, y in bf.one_steps(rules, w.x)}
        assert bf.mealy_last(m, w.x) != bf.mealy_last(m, w.y)
