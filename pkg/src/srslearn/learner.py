"""Angluin-style L* over an observation table, for DFAs and Mealy machines.

The learner talks to two callables: a membership channel ``mq(word)`` and an
equivalence channel ``eq(hypothesis)`` returning ``None`` for YES or a
counterexample word.  Advice layers plug in by wrapping these channels.
"""
from __future__ import annotations

import enum
import heapq
from dataclasses import dataclass, field
from typing import Callable, Optional

from .automata import Dfa, MealyMachine, minimize, minimize_mealy
from .errors import ContractViolation, DivergenceError
from .words import Alphabet, Word, show


class InitialTests(str, enum.Enum):
    EPSILON_ONLY = "epsilon_only"
    EPSILON_PLUS_ALPHABET = "epsilon_plus_alphabet"


class CexProcessing(str, enum.Enum):
    ALL_PREFIXES = "all_prefixes"
    ALL_SUFFIXES = "all_suffixes"


@dataclass(frozen=True)
class LearnerConfig:
    initial_tests: InitialTests = InitialTests.EPSILON_PLUS_ALPHABET
    cex_processing: CexProcessing = CexProcessing.ALL_PREFIXES
    max_rounds: int = 10_000

    def __post_init__(self):
        object.__setattr__(self, "initial_tests", InitialTests(self.initial_tests))
        object.__setattr__(self, "cex_processing", CexProcessing(self.cex_processing))
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")


@dataclass
class QueryStats:
    mq_asked: int = 0
    mq_inferred: int = 0
    eq_asked: int = 0
    eq_inferred: int = 0
    cex_total_length: int = 0

    @property
    def mq_total(self) -> int:
        return self.mq_asked + self.mq_inferred

    @property
    def eq_total(self) -> int:
        return self.eq_asked + self.eq_inferred

    def as_dict(self) -> dict:
        return {
            "mq_asked": self.mq_asked,
            "mq_inferred": self.mq_inferred,
            "eq_asked": self.eq_asked,
            "eq_inferred": self.eq_inferred,
            "cex_total_length": self.cex_total_length,
        }


class ObservationTable:
    """Selectors ``S`` (prefix-closed), tests ``C`` (suffix-closed) and the
    memoized membership answers behind every row of ``S`` and its boundary."""

    def __init__(self, alphabet: Alphabet, mq: Callable, tests, stats: Optional[QueryStats] = None):
        self.alphabet = alphabet
        self._mq = mq
        self.stats = stats if stats is not None else QueryStats()
        self.mem: dict = {}
        self.S: list = [()]
        self._S_set = {()}
        self.C: list = []
        self._C_set = set()
        self._rows: dict = {}
        for c in tests:
            self._add_test(tuple(c))
        self.fill()

    # -- queries and rows --

    def query(self, w: Word):
        try:
            return self.mem[w]
        except KeyError:
            value = self.mem[w] = self._mq(w)
            self.stats.mq_asked += 1
            return value

    def row(self, u: Word) -> tuple:
        cached = self._rows.get(u)
        if cached is not None and len(cached) == len(self.C):
            return cached
        start = 0 if cached is None else len(cached)
        extra = tuple(self.query(u + c) for c in self.C[start:])
        r = extra if cached is None else cached + extra
        self._rows[u] = r
        return r

    def entry(self, u: Word, c: Word):
        return self.mem[u + c]

    def boundary(self) -> list:
        S_set = self._S_set
        return [s + (a,) for s in self.S for a in self.alphabet if s + (a,) not in S_set]

    def fill(self):
        for s in self.S:
            self.row(s)
            for a in self.alphabet:
                self.row(s + (a,))

    # -- mutation --

    def _add_test(self, c: Word) -> bool:
        if c in self._C_set:
            return False
        self.C.append(c)
        self._C_set.add(c)
        return True

    def add_tests(self, tests) -> bool:
        changed = False
        for c in tests:
            changed |= self._add_test(tuple(c))
        if changed:
            self.fill()
        return changed

    def add_selector(self, s: Word) -> bool:
        if s in self._S_set:
            return False
        self.S.append(s)
        self._S_set.add(s)
        for a in self.alphabet:
            self.row(s + (a,))
        self.row(s)
        return True

    # -- properties --

    def representatives(self) -> dict:
        """Row vector -> first selector with that row, in S order."""
        reps = {}
        for s in self.S:
            reps.setdefault(self.row(s), s)
        return reps

    def is_closed(self) -> bool:
        reps = self.representatives()
        return all(self.row(b) in reps for b in self.boundary())

    def inconsistency(self) -> Optional[Word]:
        """A new test separating two equal-row selectors, or None."""
        groups = {}
        for s in self.S:
            groups.setdefault(self.row(s), []).append(s)
        for members in groups.values():
            first = members[0]
            for other in members[1:]:
                for a in self.alphabet:
                    r1, r2 = self.row(first + (a,)), self.row(other + (a,))
                    if r1 != r2:
                        i = next(i for i, (x, y) in enumerate(zip(r1, r2)) if x != y)
                        return (a,) + self.C[i]
        return None


def close_table(t: ObservationTable, mq: Optional[Callable] = None) -> ObservationTable:
    """Promote unmatched boundary words into S, shortest (then alphabet order) first."""
    if mq is not None:
        t._mq = mq
    key = t.alphabet.key
    reps = set(t.representatives())
    # rows only ever gain representatives, so matched boundary words stay matched
    heap = [(key(b), b) for b in t.boundary() if t.row(b) not in reps]
    heapq.heapify(heap)
    while heap:
        _, b = heapq.heappop(heap)
        if b in t._S_set:
            continue
        r = t.row(b)
        if r in reps:
            continue
        t.add_selector(b)
        reps.add(r)
        for a in t.alphabet:
            ext = b + (a,)
            if ext not in t._S_set:
                heapq.heappush(heap, (key(ext), ext))
    return t


def make_consistent(t: ObservationTable) -> ObservationTable:
    while True:
        close_table(t)
        test = t.inconsistency()
        if test is None:
            return t
        t.add_tests([test])


@dataclass
class Hypothesis:
    dfa: object
    state_words: list
    tests: list

    @property
    def n_states(self) -> int:
        return self.dfa.n_states


def _states_of(t: ObservationTable):
    reps = t.representatives()
    order = list(reps)
    index = {r: i for i, r in enumerate(order)}
    delta = []
    for r in order:
        s = reps[r]
        succ = []
        for a in t.alphabet:
            target = t.row(s + (a,))
            if target not in index:
                raise ContractViolation(f"table not closed: row of {show(s + (a,))} is unmatched")
            succ.append(index[target])
        delta.append(tuple(succ))
    return reps, order, delta


def build_hypothesis(t: ObservationTable) -> Hypothesis:
    """DFA with one state per distinct selector row."""
    if () not in t._C_set:
        raise ContractViolation("DFA tables need the empty test")
    eps = t.C.index(())
    reps, order, delta = _states_of(t)
    accepting = frozenset(i for i, r in enumerate(order) if r[eps])
    dfa = Dfa(t.alphabet, tuple(delta), order.index(t.row(())), accepting)
    return Hypothesis(dfa, [reps[r] for r in order], list(t.C))


def build_mealy_hypothesis(t: ObservationTable, outputs: Optional[Alphabet] = None) -> Hypothesis:
    reps, order, delta = _states_of(t)
    column = {c: i for i, c in enumerate(t.C)}
    out = [tuple(r[column[(a,)]] for a in t.alphabet) for r in order]
    if outputs is None:
        outputs = Alphabet(tuple(sorted({o for row in out for o in row})))
    m = MealyMachine(t.alphabet, outputs, tuple(delta), tuple(out), order.index(t.row(())))
    return Hypothesis(m, [reps[r] for r in order], list(t.C))


def process_counterexample(t: ObservationTable, cex: Word, mq: Optional[Callable] = None,
                           config: LearnerConfig = LearnerConfig()) -> ObservationTable:
    if mq is not None:
        t._mq = mq
    cex = tuple(cex)
    if config.cex_processing is CexProcessing.ALL_PREFIXES:
        for i in range(len(cex) + 1):
            t.add_selector(cex[:i])
    else:
        t.add_tests([cex[i:] for i in range(len(cex) - 1, -1, -1)])
    return t


class LStar:
    """One learning run; keeps the table and round history for inspection."""

    def __init__(self, mq: Callable, eq: Callable, alphabet: Alphabet,
                 config: LearnerConfig = LearnerConfig(), mealy: bool = False,
                 outputs: Optional[Alphabet] = None):
        self.mq, self.eq = mq, eq
        self.alphabet = alphabet
        self.config = config
        self.mealy = mealy
        self.outputs = outputs
        self.stats = QueryStats()
        self.history: list = []
        if mealy:
            tests = [(a,) for a in alphabet]
        elif config.initial_tests is InitialTests.EPSILON_PLUS_ALPHABET:
            tests = [()] + [(a,) for a in alphabet]
        else:
            tests = [()]
        self.table = ObservationTable(alphabet, mq, tests, self.stats)

    def hypothesis(self) -> Hypothesis:
        make_consistent(self.table)
        if self.mealy:
            return build_mealy_hypothesis(self.table, self.outputs)
        return build_hypothesis(self.table)

    def _hyp_value(self, hyp: Hypothesis, w: Word):
        m = hyp.dfa
        if self.mealy:
            q = m.run_from(m.initial, w[:-1])
            return m.out[q][self.alphabet.index(w[-1])]
        return m.run_from(m.initial, w) in m.accepting

    def run(self):
        for _ in range(self.config.max_rounds):
            hyp = self.hypothesis()
            self.history.append(hyp.n_states)
            self.stats.eq_asked += 1
            cex = self.eq(hyp.dfa)
            if cex is None:
                final = minimize_mealy(hyp.dfa) if self.mealy else minimize(hyp.dfa)
                return final, self.stats
            cex = self.alphabet.check(cex)
            if self.mealy and not cex:
                raise DivergenceError("empty counterexample for a Mealy hypothesis", cex)
            self.stats.cex_total_length += len(cex)
            process_counterexample(self.table, cex, config=self.config)
            if self.table.query(cex) == self._hyp_value(hyp, cex):
                raise DivergenceError(
                    f"returned word {show(cex)} does not disagree with the hypothesis", cex)
        raise DivergenceError(f"no convergence within {self.config.max_rounds} rounds")


def lstar_learn(mq: Callable, eq: Callable, alphabet: Alphabet,
                config: LearnerConfig = LearnerConfig()):
    """Learn the minimal DFA; returns ``(dfa, stats)`` with channel call counts."""
    return LStar(mq, eq, alphabet, config).run()


def lstar_mealy(oq: Callable, eq: Callable, alphabet: Alphabet,
                config: LearnerConfig = LearnerConfig(), outputs: Optional[Alphabet] = None):
    """Learn the minimal Mealy machine from last-output queries."""
    return LStar(oq, eq, alphabet, config, mealy=True, outputs=outputs).run()
