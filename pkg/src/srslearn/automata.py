"""Deterministic automata: DFAs and Mealy machines.

States are integers ``0..n-1`` and transitions are stored as a tuple of rows,
``delta[q][i]`` being the successor of ``q`` on the ``i``-th alphabet symbol.
Every search explores symbols in alphabet order, so all word-valued results
are deterministic (shortest, then smallest in alphabet order).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence

from .errors import InputError
from .words import Alphabet, Word


@dataclass(frozen=True)
class Dfa:
    alphabet: Alphabet
    delta: tuple
    initial: int
    accepting: frozenset

    def __post_init__(self):
        delta = tuple(tuple(row) for row in self.delta)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        n = len(delta)
        if n == 0:
            raise InputError("a DFA needs at least one state")
        if not 0 <= self.initial < n:
            raise InputError(f"initial state {self.initial} out of range")
        k = len(self.alphabet)
        for q, row in enumerate(delta):
            if len(row) != k:
                raise InputError(f"state {q} has {len(row)} transitions, expected {k}")
            for t in row:
                if not 0 <= t < n:
                    raise InputError(f"transition target {t} out of range")
        for q in self.accepting:
            if not 0 <= q < n:
                raise InputError(f"accepting state {q} out of range")

    @property
    def n_states(self) -> int:
        return len(self.delta)

    def step(self, q: int, symbol: str) -> int:
        return self.delta[q][self.alphabet.index(symbol)]

    def run_from(self, q: int, w: Sequence[str]) -> int:
        delta, index = self.delta, self.alphabet._index
        try:
            for s in w:
                q = delta[q][index[s]]
        except KeyError:
            self.alphabet.check(w)
        return q

    def accepts(self, w: Sequence[str]) -> bool:
        return self.run_from(self.initial, w) in self.accepting

    @cached_property
    def _moore_levels(self) -> list:
        return _moore_levels(self)

    @classmethod
    def from_dict(cls, alphabet, transitions: dict, initial, accepting) -> "Dfa":
        """Build from ``{state: {symbol: state}}`` with arbitrary hashable states."""
        if not isinstance(alphabet, Alphabet):
            alphabet = Alphabet.of(alphabet)
        names = list(transitions)
        ids = {name: i for i, name in enumerate(names)}
        delta = [[ids[transitions[name][a]] for a in alphabet] for name in names]
        return cls(alphabet, delta, ids[initial], frozenset(ids[f] for f in accepting))


@dataclass(frozen=True)
class MealyMachine:
    inputs: Alphabet
    outputs: Alphabet
    delta: tuple
    out: tuple
    initial: int

    def __post_init__(self):
        delta = tuple(tuple(row) for row in self.delta)
        out = tuple(tuple(row) for row in self.out)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "out", out)
        n = len(delta)
        if n == 0 or len(out) != n:
            raise InputError("delta and lambda must cover the same non-empty state set")
        if not 0 <= self.initial < n:
            raise InputError(f"initial state {self.initial} out of range")
        k = len(self.inputs)
        for q in range(n):
            if len(delta[q]) != k or len(out[q]) != k:
                raise InputError(f"state {q} is not total")
            for t in delta[q]:
                if not 0 <= t < n:
                    raise InputError(f"transition target {t} out of range")
            for o in out[q]:
                if o not in self.outputs:
                    raise InputError(f"output {o!r} not in output alphabet")

    @property
    def n_states(self) -> int:
        return len(self.delta)

    @property
    def alphabet(self) -> Alphabet:
        return self.inputs

    def run_from(self, q: int, w: Sequence[str]) -> int:
        index = self.inputs._index
        try:
            for s in w:
                q = self.delta[q][index[s]]
        except KeyError:
            self.inputs.check(w)
        return q

    def output_word(self, w: Sequence[str]) -> Word:
        w = self.inputs.check(w)
        q, result = self.initial, []
        for s in w:
            i = self.inputs._index[s]
            result.append(self.out[q][i])
            q = self.delta[q][i]
        return tuple(result)

    @cached_property
    def _moore_levels(self) -> list:
        return _mealy_levels(self)


# -- evaluation -------------------------------------------------------------

def run_dfa(d: Dfa, w: Sequence[str]) -> int:
    """State reached from the initial state on ``w``."""
    return d.run_from(d.initial, d.alphabet.check(w))


def accepts(d: Dfa, w: Sequence[str]) -> bool:
    return run_dfa(d, w) in d.accepting


def last_output(m: MealyMachine, w: Sequence[str]) -> str:
    """Last output letter of ``m`` on a non-empty word."""
    w = m.inputs.check(w)
    if not w:
        raise InputError("last output is undefined on the empty word")
    q = m.run_from(m.initial, w[:-1])
    return m.out[q][m.inputs.index(w[-1])]


# -- reachability -------------------------------------------------------------

def _bfs_tree(delta, start: int, k: int) -> dict:
    """Parent pointers ``state -> (parent, symbol index)`` of a BFS from start."""
    parent = {start: None}
    queue = deque([start])
    while queue:
        q = queue.popleft()
        row = delta[q]
        for i in range(k):
            t = row[i]
            if t not in parent:
                parent[t] = (q, i)
                queue.append(t)
    return parent


def _path(parent: dict, target, symbols) -> Word:
    out = []
    node = parent[target]
    while node is not None:
        prev, i = node
        out.append(symbols[i])
        node = parent[prev]
    return tuple(reversed(out))


def reachable_states(d) -> list:
    """Reachable states in BFS discovery order."""
    return list(_bfs_tree(d.delta, d.initial, len(d.alphabet)))


def access_words(d) -> dict:
    """Shortest access word of every reachable state (BFS tree)."""
    parent = _bfs_tree(d.delta, d.initial, len(d.alphabet))
    return {q: _path(parent, q, d.alphabet.symbols) for q in parent}


def shortest_access_word(d, q: int) -> Optional[Word]:
    parent = _bfs_tree(d.delta, d.initial, len(d.alphabet))
    if q not in parent:
        return None
    return _path(parent, q, d.alphabet.symbols)


# -- Moore refinement -----------------------------------------------------------

def _refine(initial_blocks: list, delta, k: int) -> list:
    """Iterate partition refinement; returns the list of block-id vectors per level."""
    levels = [initial_blocks]
    blocks = initial_blocks
    count = len(set(blocks))
    while True:
        signatures = {}
        new = []
        for q, row in enumerate(delta):
            sig = (blocks[q],) + tuple(blocks[row[i]] for i in range(k))
            new.append(signatures.setdefault(sig, len(signatures)))
        if len(signatures) == count:
            return levels
        levels.append(new)
        blocks, count = new, len(signatures)


def _moore_levels(d: Dfa) -> list:
    acc = d.accepting
    return _refine([1 if q in acc else 0 for q in range(d.n_states)], d.delta, len(d.alphabet))


def _mealy_levels(m: MealyMachine) -> list:
    ids = {}
    first = [ids.setdefault(row, len(ids)) for row in m.out]
    return _refine(first, m.delta, len(m.inputs))


def distinguishing_word(d: Dfa, q1: int, q2: int) -> Optional[Word]:
    """Shortest word on which exactly one of ``q1``, ``q2`` accepts."""
    levels = d._moore_levels
    if levels[-1][q1] == levels[-1][q2]:
        return None
    i = next(j for j, blocks in enumerate(levels) if blocks[q1] != blocks[q2])
    out = []
    k = len(d.alphabet)
    while i > 0:
        below = levels[i - 1]
        for a in range(k):
            t1, t2 = d.delta[q1][a], d.delta[q2][a]
            if below[t1] != below[t2]:
                out.append(d.alphabet.symbols[a])
                q1, q2 = t1, t2
                break
        else:
            # split came from the states' own level-(i-1) blocks
            raise AssertionError("refinement levels are inconsistent")
        i -= 1
        while i > 0 and levels[i - 1][q1] != levels[i - 1][q2]:
            i -= 1
    return tuple(out)


def mealy_distinguishing_word(m: MealyMachine, q1: int, q2: int) -> Optional[Word]:
    """Shortest non-empty word whose last output differs between ``q1`` and ``q2``."""
    levels = m._moore_levels
    if levels[-1][q1] == levels[-1][q2]:
        return None
    i = next(j for j, blocks in enumerate(levels) if blocks[q1] != blocks[q2])
    out = []
    k = len(m.inputs)
    while True:
        if i == 0:
            a = next(a for a in range(k) if m.out[q1][a] != m.out[q2][a])
            out.append(m.inputs.symbols[a])
            return tuple(out)
        below = levels[i - 1]
        a = next(a for a in range(k) if below[m.delta[q1][a]] != below[m.delta[q2][a]])
        out.append(m.inputs.symbols[a])
        q1, q2 = m.delta[q1][a], m.delta[q2][a]
        i -= 1
        while i > 0 and levels[i - 1][q1] != levels[i - 1][q2]:
            i -= 1


# -- minimization -----------------------------------------------------------

def _canonical_order(delta, initial: int, k: int, block_of) -> list:
    """Blocks in BFS discovery order over the quotient."""
    order = {block_of[initial]: 0}
    queue = deque([initial])
    seen = {initial}
    while queue:
        q = queue.popleft()
        for i in range(k):
            t = delta[q][i]
            if t in seen:
                continue
            seen.add(t)
            queue.append(t)
            order.setdefault(block_of[t], len(order))
    return order


def minimize(d: Dfa) -> Dfa:
    """Minimal equivalent DFA, states numbered in BFS order from the initial state."""
    k = len(d.alphabet)
    blocks = d._moore_levels[-1]
    order = _canonical_order(d.delta, d.initial, k, blocks)
    delta = [None] * len(order)
    accepting = set()
    for q in reachable_states(d):
        b = order[blocks[q]]
        if delta[b] is None:
            delta[b] = tuple(order[blocks[d.delta[q][i]]] for i in range(k))
            if q in d.accepting:
                accepting.add(b)
    return Dfa(d.alphabet, tuple(delta), 0, frozenset(accepting))


def minimize_mealy(m: MealyMachine) -> MealyMachine:
    k = len(m.inputs)
    blocks = m._moore_levels[-1]
    order = _canonical_order(m.delta, m.initial, k, blocks)
    delta = [None] * len(order)
    out = [None] * len(order)
    for q in reachable_states(m):
        b = order[blocks[q]]
        if delta[b] is None:
            delta[b] = tuple(order[blocks[m.delta[q][i]]] for i in range(k))
            out[b] = m.out[q]
    return MealyMachine(m.inputs, m.outputs, tuple(delta), tuple(out), 0)


def is_minimal(d) -> bool:
    levels = d._moore_levels
    return len(set(levels[-1])) == d.n_states and len(reachable_states(d)) == d.n_states


def isomorphic(d1: Dfa, d2: Dfa) -> bool:
    """Equality of the canonical minimal forms (language equivalence)."""
    return d1.alphabet == d2.alphabet and minimize(d1) == minimize(d2)


# -- product searches ---------------------------------------------------------------

def _pair_bfs(d1, d2, start: tuple, found):
    """BFS over state pairs; returns the first word whose end pair satisfies ``found``."""
    k = len(d1.alphabet)
    symbols = d1.alphabet.symbols
    if found(*start):
        return ()
    parent = {start: None}
    queue = deque([start])
    delta1, delta2 = d1.delta, d2.delta
    while queue:
        pair = queue.popleft()
        p1, p2 = pair
        r1, r2 = delta1[p1], delta2[p2]
        for i in range(k):
            nxt = (r1[i], r2[i])
            if nxt in parent:
                continue
            parent[nxt] = (pair, i)
            if found(*nxt):
                return _path(parent, nxt, symbols)
            queue.append(nxt)
    return None


def shortest_counterexample(d1: Dfa, d2: Dfa) -> Optional[Word]:
    """Shortest word in the symmetric difference of the two languages."""
    if d1.alphabet != d2.alphabet:
        raise InputError("alphabet mismatch")
    a1, a2 = d1.accepting, d2.accepting
    return _pair_bfs(d1, d2, (d1.initial, d2.initial), lambda p, q: (p in a1) != (q in a2))


def mealy_counterexample(m1: MealyMachine, m2: MealyMachine) -> Optional[Word]:
    """Shortest non-empty word whose last output differs between the machines."""
    if m1.inputs != m2.inputs:
        raise InputError("alphabet mismatch")
    k = len(m1.inputs)
    symbols = m1.inputs.symbols
    start = (m1.initial, m2.initial)
    parent = {start: None}
    queue = deque([start])
    while queue:
        pair = queue.popleft()
        p1, p2 = pair
        for i in range(k):
            if m1.out[p1][i] != m2.out[p2][i]:
                return _path(parent, pair, symbols) + (symbols[i],)
        for i in range(k):
            nxt = (m1.delta[p1][i], m2.delta[p2][i])
            if nxt not in parent:
                parent[nxt] = (pair, i)
                queue.append(nxt)
    return None


# -- subsumption ------------------------------------------------------------------

def subsumption_relation(d: Dfa) -> frozenset:
    """All pairs ``(s1, s2)`` with the residual language of s1 contained in that of s2.

    Greatest fixpoint: start from pairs respecting acceptance and drop any pair
    with a successor pair already dropped.
    """
    n, k = d.n_states, len(d.alphabet)
    acc = d.accepting
    preds = [[[] for _ in range(n)] for _ in range(k)]
    for q, row in enumerate(d.delta):
        for i in range(k):
            preds[i][row[i]].append(q)
    keep = [[not (s1 in acc and s2 not in acc) for s2 in range(n)] for s1 in range(n)]
    queue = deque((s1, s2) for s1 in range(n) for s2 in range(n) if not keep[s1][s2])
    while queue:
        t1, t2 = queue.popleft()
        for i in range(k):
            for s1 in preds[i][t1]:
                row = keep[s1]
                for s2 in preds[i][t2]:
                    if row[s2]:
                        row[s2] = False
                        queue.append((s1, s2))
    return frozenset((s1, s2) for s1 in range(n) for s2 in range(n) if keep[s1][s2])


def subsumption_witness(d: Dfa, s1: int, s2: int) -> Optional[Word]:
    """Shortest word accepted from ``s1`` but not from ``s2``."""
    acc = d.accepting
    return _pair_bfs(d, d, (s1, s2), lambda p, q: p in acc and q not in acc)
