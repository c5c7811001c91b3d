"""Seeded target languages and the advice systems that match them."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional, Sequence

from .automata import Dfa, minimize
from .errors import InputError
from .nfa import Epsilon, sigma_star
from .rewriting import ControlledRule, Csrs, RewriteRule, Srs
from .rng import SplitMix64
from .words import Alphabet, Word


def _rng(seed) -> SplitMix64:
    return seed if isinstance(seed, SplitMix64) else SplitMix64(seed)


# -- random DFAs ---------------------------------------------------------------

def random_dfa(n: int, alphabet: Alphabet, accept_prob: float = 0.1, seed=0) -> Dfa:
    """Uniform random transitions and independent acceptance coin flips.

    Draw order per state: the acceptance flip, then one target per symbol in
    alphabet order.
    """
    if n < 1:
        raise InputError("a DFA needs at least one state")
    if not 0.0 <= accept_prob <= 1.0:
        raise InputError("accept_prob must lie in [0, 1]")
    rng = _rng(seed)
    accepting = set()
    delta = []
    for q in range(n):
        if rng.random() < accept_prob:
            accepting.add(q)
        delta.append(tuple(rng.randbelow(n) for _ in alphabet))
    return Dfa(alphabet, tuple(delta), 0, frozenset(accepting))


def make_letter_idempotent(d: Dfa, a: str) -> Dfa:
    """Turn every state entered by ``a`` into an ``a``-fixpoint."""
    i = d.alphabet.index(a)
    image = {row[i] for row in d.delta}
    delta = [list(row) for row in d.delta]
    for p in image:
        delta[p][i] = p
    return Dfa(d.alphabet, tuple(map(tuple, delta)), d.initial, d.accepting)


# -- pattern languages ------------------------------------------------------------

def _aho_corasick(patterns: list, alphabet: Alphabet):
    """Complete goto function and per-node matched-pattern bitmasks."""
    children = [{}]
    out = [0]
    for bit, p in enumerate(patterns):
        node = 0
        for s in p:
            nxt = children[node].get(s)
            if nxt is None:
                children.append({})
                out.append(0)
                nxt = children[node][s] = len(children) - 1
            node = nxt
        out[node] |= 1 << bit
    n = len(children)
    fail = [0] * n
    goto = [[0] * len(alphabet) for _ in range(n)]
    queue = deque()
    for i, s in enumerate(alphabet):
        child = children[0].get(s)
        if child is None:
            goto[0][i] = 0
        else:
            goto[0][i] = child
            queue.append(child)
    while queue:
        node = queue.popleft()
        out[node] |= out[fail[node]]
        for i, s in enumerate(alphabet):
            child = children[node].get(s)
            if child is None:
                goto[node][i] = goto[fail[node]][i]
            else:
                fail[child] = goto[fail[node]][i]
                goto[node][i] = child
                queue.append(child)
    return goto, out


def pattern_dfa(patterns: Sequence[Sequence[str]], mode: str, alphabet: Alphabet) -> Dfa:
    """Minimal DFA for words containing any (or all) of the patterns as infixes."""
    patterns = [alphabet.check(p) for p in patterns]
    if not patterns:
        raise InputError("need at least one pattern")
    if any(not p for p in patterns):
        raise InputError("patterns must be non-empty")
    if mode not in ("any", "all"):
        raise InputError(f"unknown pattern mode {mode!r}")
    goto, out = _aho_corasick(patterns, alphabet)
    full = (1 << len(patterns)) - 1
    k = len(alphabet)
    if mode == "any":
        delta = [tuple(q if out[q] else goto[q][i] for i in range(k)) for q in range(len(goto))]
        accepting = {q for q in range(len(goto)) if out[q]}
        return minimize(Dfa(alphabet, tuple(delta), 0, frozenset(accepting)))
    ids = {(0, out[0]): 0}
    order = [(0, out[0])]
    delta = []
    for node, seen in order:
        row = []
        for i in range(k):
            t = goto[node][i]
            state = (t, seen | out[t])
            if state not in ids:
                ids[state] = len(order)
                order.append(state)
            row.append(ids[state])
        delta.append(tuple(row))
    accepting = {i for i, (_, seen) in enumerate(order) if seen == full}
    return minimize(Dfa(alphabet, tuple(delta), 0, frozenset(accepting)))


def subsequence_dfa(patterns: Sequence[Sequence[str]], alphabet: Alphabet) -> Dfa:
    """Minimal DFA for words containing one of the patterns as a scattered
    subsequence; such languages are upward closed."""
    patterns = [alphabet.check(p) for p in patterns]
    if not patterns:
        raise InputError("need at least one pattern")
    start = tuple(0 for _ in patterns)
    ids = {start: 0}
    order = [start]
    delta = []
    for pos in order:
        row = []
        for s in alphabet:
            t = tuple(i + 1 if i < len(p) and p[i] == s else i for i, p in zip(pos, patterns))
            if t not in ids:
                ids[t] = len(order)
                order.append(t)
            row.append(ids[t])
        delta.append(tuple(row))
    accepting = {k for k, pos in enumerate(order)
                 if any(i == len(p) for i, p in zip(pos, patterns))}
    return minimize(Dfa(alphabet, tuple(delta), 0, frozenset(accepting)))


def random_pattern(length: int, alphabet: Alphabet, seed) -> Word:
    rng = _rng(seed)
    return tuple(alphabet.symbols[rng.randbelow(len(alphabet))] for _ in range(length))


# -- convolution ----------------------------------------------------------------

def convolution(d1: Dfa, d2: Dfa) -> Dfa:
    """Interleaving product: shared symbols move both components, private ones one."""
    alphabet = d1.alphabet.union(d2.alphabet)
    moves = []
    for s in alphabet:
        i1 = d1.alphabet.index(s) if s in d1.alphabet else None
        i2 = d2.alphabet.index(s) if s in d2.alphabet else None
        moves.append((i1, i2))
    start = (d1.initial, d2.initial)
    ids = {start: 0}
    order = [start]
    delta = []
    for p, q in order:
        row = []
        for i1, i2 in moves:
            t = (p if i1 is None else d1.delta[p][i1], q if i2 is None else d2.delta[q][i2])
            if t not in ids:
                ids[t] = len(order)
                order.append(t)
            row.append(ids[t])
        delta.append(tuple(row))
    accepting = {i for i, (p, q) in enumerate(order) if p in d1.accepting and q in d2.accepting}
    return minimize(Dfa(alphabet, tuple(delta), 0, frozenset(accepting)))


# -- bitwise addition ---------------------------------------------------------------

def bitadd_alphabet() -> Alphabet:
    return Alphabet(tuple(f"({a},{b},{c})" for a, b, c in product((0, 1), repeat=3)))


def decode_bits(symbol: str) -> tuple:
    a, b, c = symbol.strip("()").split(",")
    return int(a), int(b), int(c)


def bitadd_dfa() -> Dfa:
    """LSB-first ``x + y = z``: state 0 carry 0 (accepting), 1 carry 1, 2 sink."""
    alphabet = bitadd_alphabet()
    delta = []
    for carry in (0, 1):
        row = []
        for s in alphabet:
            a, b, c = decode_bits(s)
            total = a + b + carry
            row.append(total // 2 if total % 2 == c else 2)
        delta.append(tuple(row))
    delta.append(tuple(2 for _ in alphabet))
    return Dfa(alphabet, tuple(delta), 0, frozenset({0}))


# -- advice builders ---------------------------------------------------------------

def idempotent_srs(alphabet: Alphabet, u: Sequence[str]) -> Srs:
    u = alphabet.check(u)
    return Srs(alphabet, (RewriteRule(u + u, u),))


def commutation_srs(alphabet: Alphabet, independent: Iterable[tuple]) -> Srs:
    """``b a -> a b`` for every independent pair with ``a < b`` in alphabet order."""
    pairs = set()
    for x, y in independent:
        if x == y:
            continue
        lo, hi = sorted((x, y), key=alphabet.index)
        pairs.add((lo, hi))
    ordered = sorted(pairs, key=lambda p: (alphabet.index(p[0]), alphabet.index(p[1])))
    return Srs(alphabet, tuple(RewriteRule((b, a), (a, b)) for a, b in ordered))


def conv_srs(alphabet: Alphabet, sigma1: Iterable[str], sigma2: Iterable[str]) -> Srs:
    """Commutation of the private letters of two components."""
    s1, s2 = set(sigma1), set(sigma2)
    return commutation_srs(alphabet, [(a, b) for a in s1 - s2 for b in s2 - s1])


def bin_srs() -> Srs:
    alphabet = bitadd_alphabet()
    return Srs(alphabet, (RewriteRule(("(1,0,0)",), ("(0,1,0)",)),
                          RewriteRule(("(1,0,1)",), ("(0,1,1)",))))


def sync_srs(alphabet: Alphabet, w: Sequence[str]) -> Srs:
    """``x w -> w`` for every letter ``x``."""
    w = alphabet.check(w)
    return Srs(alphabet, tuple(RewriteRule((x,) + w, w) for x in alphabet))


def upward_srs(alphabet: Alphabet) -> Srs:
    """``eps -> a`` for every letter; a one-sided system."""
    return Srs(alphabet, tuple(RewriteRule((), (a,)) for a in alphabet), one_sided=True)


# -- partial DFAs and their controlled encoding ------------------------------------------

@dataclass(frozen=True, eq=True)
class PartialDfa:
    alphabet: Alphabet
    states: frozenset
    initial: int
    accepting: frozenset
    transitions: tuple  # sorted ((state, symbol index), target) pairs

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        object.__setattr__(self, "transitions", tuple(sorted(self.transitions)))
        if self.initial not in self.states:
            raise InputError("initial state missing from the partial DFA")
        for (q, i), t in self.transitions:
            if q not in self.states or t not in self.states or not 0 <= i < len(self.alphabet):
                raise InputError(f"transition {(q, i)} -> {t} out of range")

    @property
    def table(self) -> dict:
        return dict(self.transitions)

    def run(self, w: Sequence[str]) -> Optional[int]:
        table = self.table
        q = self.initial
        for s in w:
            q = table.get((q, self.alphabet.index(s)))
            if q is None:
                return None
        return q


def access_words_partial(b: PartialDfa) -> dict:
    table = b.table
    words = {b.initial: ()}
    queue = deque([b.initial])
    while queue:
        q = queue.popleft()
        for i, s in enumerate(b.alphabet):
            t = table.get((q, i))
            if t is not None and t not in words:
                words[t] = words[q] + (s,)
                queue.append(t)
    return words


def encode_partial_dfa(b: PartialDfa) -> Csrs:
    """Rules ``(u a, u', {eps}, Sigma*)`` for the non-tree transitions of ``b``."""
    access = access_words_partial(b)
    missing = b.states - set(access)
    if missing:
        raise InputError(f"states {sorted(missing)} are unreachable through defined transitions")
    access_set = set(access.values())
    table = b.table
    top = sigma_star(b.alphabet)
    rules = []
    for q, u in sorted(access.items(), key=lambda kv: b.alphabet.key(kv[1])):
        for i, s in enumerate(b.alphabet):
            t = table.get((q, i))
            if t is None or u + (s,) in access_set:
                continue
            rules.append(ControlledRule(u + (s,), access[t], Epsilon(), top))
    return Csrs(b.alphabet, tuple(rules))


def prune_transitions(d: Dfa, keep: int, seed) -> PartialDfa:
    """Keep ``keep`` transitions grown as a random connected fragment from the
    initial state, so every kept state stays reachable."""
    k = len(d.alphabet)
    if keep < 1:
        raise InputError("keep must be at least 1")
    if keep > d.n_states * k:
        raise InputError(f"keep={keep} exceeds the {d.n_states * k} transitions")
    rng = _rng(seed)
    reached = {d.initial}
    kept = {}
    frontier = [(d.initial, i) for i in range(k)]
    while len(kept) < keep:
        if not frontier:
            raise InputError(f"only {len(kept)} transitions are reachable, keep={keep}")
        q, i = frontier.pop(rng.randbelow(len(frontier)))
        t = d.delta[q][i]
        kept[(q, i)] = t
        if t not in reached:
            reached.add(t)
            frontier.extend((t, j) for j in range(k))
            frontier.sort()
    return PartialDfa(d.alphabet, frozenset(reached), d.initial,
                      d.accepting & reached, tuple(kept.items()))


def total_partial(d: Dfa) -> PartialDfa:
    return PartialDfa(d.alphabet, frozenset(range(d.n_states)), d.initial, d.accepting,
                      tuple(((q, i), t) for q, row in enumerate(d.delta) for i, t in enumerate(row)))
