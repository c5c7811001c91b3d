"""Advice layer: sits between the learner and the teacher, answering queries
from a rewriting system when it can and forwarding them otherwise."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .automata import (
    Dfa,
    MealyMachine,
    access_words,
    distinguishing_word,
    mealy_distinguishing_word,
    subsumption_relation,
    subsumption_witness,
)
from .errors import AdviceError, InputError, NonTerminationError, UnsupportedAdviceError
from .learner import QueryStats
from .nfa import distinguished_within, reach_words
from .rewriting import Csrs, Srs, Status, check_convergence
from .words import Alphabet, Word, show


class AdviceKind(str, enum.Enum):
    NONE = "none"
    TWO_SIDED = "two_sided"
    TWO_SIDED_CONTROLLED = "two_sided_controlled"
    POSITIVE = "positive"
    NEGATIVE = "negative"
    UPWARD_CLOSED = "upward_closed"


@dataclass(frozen=True)
class AdviceMode:
    kind: AdviceKind
    system: Optional[object] = None
    assume_convergent: bool = False
    use_membership: bool = True

    def __post_init__(self):
        kind = AdviceKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is AdviceKind.NONE:
            return
        expected = Csrs if kind is AdviceKind.TWO_SIDED_CONTROLLED else Srs
        if not isinstance(self.system, expected):
            raise InputError(f"{kind.value} advice needs a {expected.__name__}")
        if kind is AdviceKind.UPWARD_CLOSED:
            if any(r.lhs or len(r.rhs) != 1 for r in self.system.rules):
                raise InputError("upward-closed advice is the system {eps -> a}")
        if self.infers_membership and not self.assume_convergent:
            verdict = check_convergence(self.system)
            if verdict.convergent is not Status.PROVED:
                raise AdviceError(
                    f"membership inference needs a convergent system ({verdict}); "
                    "pass assume_convergent or use the advice for equivalence queries only")

    @property
    def infers_membership(self) -> bool:
        return self.use_membership and self.kind in (
            AdviceKind.TWO_SIDED, AdviceKind.TWO_SIDED_CONTROLLED)

    @classmethod
    def none(cls) -> "AdviceMode":
        return cls(AdviceKind.NONE)

    @classmethod
    def two_sided(cls, srs: Srs, **kw) -> "AdviceMode":
        return cls(AdviceKind.TWO_SIDED, srs, **kw)

    @classmethod
    def controlled(cls, csrs: Csrs, **kw) -> "AdviceMode":
        return cls(AdviceKind.TWO_SIDED_CONTROLLED, csrs, **kw)

    @classmethod
    def positive(cls, srs: Srs) -> "AdviceMode":
        return cls(AdviceKind.POSITIVE, srs)

    @classmethod
    def negative(cls, srs: Srs) -> "AdviceMode":
        return cls(AdviceKind.NEGATIVE, srs)

    @classmethod
    def upward_closed(cls, alphabet: Alphabet) -> "AdviceMode":
        from .generators import upward_srs
        return cls(AdviceKind.UPWARD_CLOSED, upward_srs(alphabet))


# -- caches -----------------------------------------------------------------------

@dataclass
class NormalFormCache:
    """Answers keyed by normal form, plus a memo of prefix normal forms."""

    answers: dict = field(default_factory=dict)
    hits: int = 0
    misses: int = 0
    prefix_nf: dict = field(default_factory=dict, repr=False)

    def __contains__(self, key) -> bool:
        return key in self.answers

    def __len__(self) -> int:
        return len(self.answers)


def is_subsequence(small: Sequence[str], big: Sequence[str]) -> bool:
    if len(small) > len(big):
        return False
    it = iter(big)
    return all(s in it for s in small)


@dataclass
class SignedCache:
    """Known members and non-members, kept as antichains under the subsequence order."""

    positive: list = field(default_factory=list)
    negative: list = field(default_factory=list)

    def add(self, w: Word, answer: bool):
        w = tuple(w)
        if answer:
            if any(is_subsequence(p, w) for p in self.positive):
                return
            self.positive = [p for p in self.positive if not is_subsequence(w, p)] + [w]
        else:
            if any(is_subsequence(w, n) for n in self.negative):
                return
            self.negative = [n for n in self.negative if not is_subsequence(n, w)] + [w]


def upward_closed_infer(s: SignedCache, w: Sequence[str]) -> Optional[bool]:
    """True/False when the signed cache decides ``w`` for an upward-closed target, else None."""
    w = tuple(w)
    if any(is_subsequence(p, w) for p in s.positive):
        return True
    if any(is_subsequence(w, n) for n in s.negative):
        return False
    return None


# -- membership -------------------------------------------------------------------

def _incremental_nf(engine, memo: dict, w: Word) -> Word:
    # convergence gives NF(x a) = NF(NF(x) a), so reuse the longest known prefix
    k = len(w)
    while k and w[:k] not in memo:
        k -= 1
    nf = memo[w[:k]] if k else ()
    for j in range(k, len(w)):
        nf = engine.extend(nf, w[j])
        memo[w[:j + 1]] = nf
    return nf


def cache_key(mode: AdviceMode, w: Word, memo: Optional[dict] = None) -> Word:
    if not mode.infers_membership:
        return w
    engine = mode.system._engine
    try:
        if memo is not None and engine.suffix_free:
            return _incremental_nf(engine, memo, mode.system.alphabet.check(w))
        return engine.normalize(w)
    except NonTerminationError as exc:
        raise AdviceError(f"advice unusable: {exc}") from exc


def advised_membership(mode: AdviceMode, cache, mq: Callable, w: Sequence[str],
                       stats: Optional[QueryStats] = None, verify: Optional[Callable] = None):
    """Answer from the cache when the advice allows it, otherwise ask ``mq`` and record."""
    w = tuple(w)
    stats = stats if stats is not None else QueryStats()
    if mode.kind is AdviceKind.NONE:
        # identity normal form: only exact repeats are answered from the cache
        answers = cache.answers
        if w in answers:
            cache.hits += 1
            stats.mq_inferred += 1
            return answers[w]
        cache.misses += 1
        stats.mq_asked += 1
        answer = answers[w] = mq(w)
        return answer
    if mode.kind is AdviceKind.UPWARD_CLOSED:
        inferred = upward_closed_infer(cache, w)
        if inferred is not None:
            stats.mq_inferred += 1
            if verify is not None:
                verify(w, inferred)
            return inferred
        answer = mq(w)
        stats.mq_asked += 1
        cache.add(w, answer)
        return answer
    key = cache_key(mode, w, cache.prefix_nf)
    if key in cache.answers:
        cache.hits += 1
        stats.mq_inferred += 1
        answer = cache.answers[key]
        if verify is not None:
            verify(w, answer)
        return answer
    cache.misses += 1
    answer = cache.answers[key] = mq(w)
    stats.mq_asked += 1
    return answer


# -- consistency checks ---------------------------------------------------------------

@dataclass(frozen=True)
class Witness:
    """Words ``x -> y`` (one rewrite step) that the automaton separates."""

    x: Word
    y: Word
    rule_index: int
    prefix: Word
    suffix: Word

    def __iter__(self):
        return iter((self.x, self.y))

    def __str__(self):
        return f"{show(self.x)} / {show(self.y)}"


def _same_alphabet(r, d):
    if set(r.alphabet.symbols) != set(d.alphabet.symbols):
        raise InputError("the rewriting system and the automaton must share one alphabet")


def _access(d) -> dict:
    return access_words(d)


def check_consistency(r: Srs, d: Dfa) -> Optional[Witness]:
    """None if ``r`` is consistent with L(d), else the first witness in scan
    order (rules in list order, states in id order)."""
    _same_alphabet(r, d)
    access = None
    for idx, rule in enumerate(r.rules):
        for q in range(d.n_states):
            s1, s2 = d.run_from(q, rule.lhs), d.run_from(q, rule.rhs)
            if s1 == s2:
                continue
            if access is None:
                access = _access(d)
            if q not in access:
                continue
            v = distinguishing_word(d, s1, s2)
            if v is None:
                continue
            u = access[q]
            return Witness(u + rule.lhs + v, u + rule.rhs + v, idx, u, v)
    return None


def check_consistency_csrs(c: Csrs, d: Dfa) -> Optional[Witness]:
    _same_alphabet(c, d)
    for idx, rule in enumerate(c.rules):
        reach = reach_words(d, rule.prefix_ctx)
        for q in sorted(reach):
            s1, s2 = d.run_from(q, rule.lhs), d.run_from(q, rule.rhs)
            if s1 == s2:
                continue
            y = distinguished_within(d, s1, s2, rule.suffix_ctx)
            if y is None:
                continue
            x = reach[q]
            return Witness(x + rule.lhs + y, x + rule.rhs + y, idx, x, y)
    return None


def check_consistency_one_sided(r: Srs, d: Dfa, polarity: str) -> Optional[Witness]:
    """Positive: rewriting keeps members inside; negative: keeps non-members outside."""
    if polarity not in ("positive", "negative"):
        raise InputError(f"unknown polarity {polarity!r}")
    _same_alphabet(r, d)
    relation = None
    access = None
    for idx, rule in enumerate(r.rules):
        for q in range(d.n_states):
            s1, s2 = d.run_from(q, rule.lhs), d.run_from(q, rule.rhs)
            if s1 == s2:
                continue
            if relation is None:
                relation = subsumption_relation(d)
                access = _access(d)
            small, big = (s1, s2) if polarity == "positive" else (s2, s1)
            if (small, big) in relation or q not in access:
                continue
            v = subsumption_witness(d, small, big)
            u = access[q]
            return Witness(u + rule.lhs + v, u + rule.rhs + v, idx, u, v)
    return None


def _mealy_last(m: MealyMachine, q: int, w: Word) -> str:
    p = m.run_from(q, w[:-1])
    return m.out[p][m.inputs.index(w[-1])]


def check_consistency_mealy(r: Srs, m: MealyMachine) -> Optional[Witness]:
    """Rewriting must preserve the last output letter; both sides non-empty."""
    _same_alphabet(r, m)
    for rule in r.rules:
        if not rule.lhs or not rule.rhs:
            raise UnsupportedAdviceError(f"Mealy advice needs non-empty rule sides: {rule}")
    access = access_words(m)
    for idx, rule in enumerate(r.rules):
        for q in range(m.n_states):
            if q not in access:
                continue
            u = access[q]
            if _mealy_last(m, q, rule.lhs) != _mealy_last(m, q, rule.rhs):
                return Witness(u + rule.lhs, u + rule.rhs, idx, u, ())
            s1, s2 = m.run_from(q, rule.lhs), m.run_from(q, rule.rhs)
            if s1 == s2:
                continue
            v = mealy_distinguishing_word(m, s1, s2)
            if v is not None:
                return Witness(u + rule.lhs + v, u + rule.rhs + v, idx, u, v)
    return None


def find_witness(mode: AdviceMode, h) -> Optional[Witness]:
    """Run the consistency check that matches the advice mode."""
    kind = mode.kind
    if kind is AdviceKind.NONE:
        return None
    if isinstance(h, MealyMachine):
        if kind is not AdviceKind.TWO_SIDED:
            raise UnsupportedAdviceError(f"{kind.value} advice is not defined for Mealy machines")
        return check_consistency_mealy(mode.system, h)
    if kind is AdviceKind.TWO_SIDED:
        return check_consistency(mode.system, h)
    if kind is AdviceKind.TWO_SIDED_CONTROLLED:
        return check_consistency_csrs(mode.system, h)
    if kind in (AdviceKind.POSITIVE, AdviceKind.UPWARD_CLOSED):
        return check_consistency_one_sided(mode.system, h, "positive")
    return check_consistency_one_sided(mode.system, h, "negative")


def _hyp_value(h, w: Word):
    if isinstance(h, MealyMachine):
        return _mealy_last(h, h.initial, w)
    return h.accepts(w)


def advised_equivalence(mode: AdviceMode, h, mq: Callable, eq: Callable,
                        stats: Optional[QueryStats] = None, on_witness: Optional[Callable] = None):
    """Counterexample from an advice witness (one MQ) or from the real EQ.

    Returns None when the teacher confirms equivalence.
    """
    stats = stats if stats is not None else QueryStats()
    witness = find_witness(mode, h)
    if witness is None:
        stats.eq_asked += 1
        return eq(h)
    if on_witness is not None:
        on_witness(witness)
    stats.eq_inferred += 1
    x, y = witness.x, witness.y
    if mq(x) != _hyp_value(h, x):
        return x
    return y


class AdvisedTeacher:
    """Membership/equivalence channels for the learner, backed by a teacher."""

    def __init__(self, teacher, mode: AdviceMode = AdviceMode.none(), shadow: bool = False):
        self.teacher = teacher
        self.mode = mode
        self.shadow = shadow
        self.stats = QueryStats()
        self.cache = SignedCache() if mode.kind is AdviceKind.UPWARD_CLOSED else NormalFormCache()
        self.witness_mqs = 0
        self.witnesses: list = []
        if mode.system is not None:
            _same_alphabet(mode.system, teacher.target)

    @property
    def last_witness(self) -> Optional[Witness]:
        return self.witnesses[-1] if self.witnesses else None

    @property
    def mismatches(self) -> list:
        return self.teacher.mismatches

    def membership(self, w: Sequence[str]):
        verify = self.teacher.verify if self.shadow else None
        return advised_membership(self.mode, self.cache, self.teacher.membership, w,
                                  self.stats, verify)

    def _witness_mq(self, w: Word):
        self.witness_mqs += 1
        return self.membership(w)

    def equivalence(self, h) -> Optional[Word]:
        before = self.stats.eq_inferred
        cex = advised_equivalence(self.mode, h, self._witness_mq, self.teacher.equivalence,
                                  self.stats, self.witnesses.append)
        if cex is not None:
            self.stats.cex_total_length += len(cex)
            if self.shadow and self.stats.eq_inferred > before:
                self.teacher.verify_counterexample(h, cex)
        return cex
