"""Regular expressions over token alphabets, their epsilon-NFAs, and the
DFA x NFA product searches used by controlled rewriting."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

from .automata import Dfa, _path
from .errors import InputError
from .words import Alphabet, Word


class Regex:
    """Base class of the regex AST."""

    def __add__(self, other):
        return Alt(self, other)

    def __mul__(self, other):
        return Concat(self, other)


@dataclass(frozen=True)
class EmptySet(Regex):
    pass


@dataclass(frozen=True)
class Epsilon(Regex):
    pass


@dataclass(frozen=True)
class Sym(Regex):
    symbol: str


@dataclass(frozen=True)
class Concat(Regex):
    left: Regex
    right: Regex


@dataclass(frozen=True)
class Alt(Regex):
    left: Regex
    right: Regex


@dataclass(frozen=True)
class Star(Regex):
    inner: Regex


def any_symbol(alphabet: Alphabet) -> Regex:
    """The expression ``a1 + ... + an``."""
    e = Sym(alphabet.symbols[0])
    for s in alphabet.symbols[1:]:
        e = Alt(e, Sym(s))
    return e


def sigma_star(alphabet: Alphabet) -> Regex:
    return Star(any_symbol(alphabet))


def literal(w: Sequence[str]) -> Regex:
    if not w:
        return Epsilon()
    e = Sym(w[0])
    for s in w[1:]:
        e = Concat(e, Sym(s))
    return e


def symbols_of(e: Regex) -> set:
    if isinstance(e, Sym):
        return {e.symbol}
    if isinstance(e, (Concat, Alt)):
        return symbols_of(e.left) | symbols_of(e.right)
    if isinstance(e, Star):
        return symbols_of(e.inner)
    return set()


def _single_symbols(e: Regex):
    """Symbol set if ``e`` is an alternation of single symbols, else None."""
    if isinstance(e, Sym):
        return {e.symbol}
    if isinstance(e, Alt):
        left, right = _single_symbols(e.left), _single_symbols(e.right)
        if left is not None and right is not None:
            return left | right
    return None


def is_universal(e: Regex, alphabet: Alphabet) -> bool:
    """Syntactic recognition of Sigma*; a False answer is inconclusive."""
    if isinstance(e, Star):
        syms = _single_symbols(e.inner)
        return syms is not None and syms >= set(alphabet.symbols)
    return False


def is_epsilon(e: Regex) -> bool:
    return isinstance(e, Epsilon)


def reverse(e: Regex) -> Regex:
    if isinstance(e, Concat):
        return Concat(reverse(e.right), reverse(e.left))
    if isinstance(e, Alt):
        return Alt(reverse(e.left), reverse(e.right))
    if isinstance(e, Star):
        return Star(reverse(e.inner))
    return e


def matches_naive(e: Regex, w: Word) -> bool:
    """Membership straight from the recursive definition (test oracle)."""

    @lru_cache(maxsize=None)
    def m(node, i, j):
        if isinstance(node, EmptySet):
            return False
        if isinstance(node, Epsilon):
            return i == j
        if isinstance(node, Sym):
            return j == i + 1 and w[i] == node.symbol
        if isinstance(node, Alt):
            return m(node.left, i, j) or m(node.right, i, j)
        if isinstance(node, Concat):
            return any(m(node.left, i, k) and m(node.right, k, j) for k in range(i, j + 1))
        if isinstance(node, Star):
            if i == j:
                return True
            return any(m(node.inner, i, k) and m(node, k, j) for k in range(i + 1, j + 1))
        raise TypeError(node)

    return m(e, 0, len(w))


@dataclass(frozen=True)
class Nfa:
    """Epsilon-NFA. ``moves[q]`` maps a symbol to a frozenset of targets."""

    alphabet: Alphabet
    n_states: int
    initial: frozenset
    accepting: frozenset
    moves: tuple
    eps: tuple

    def closure(self, states) -> frozenset:
        seen = set(states)
        stack = list(states)
        while stack:
            q = stack.pop()
            for t in self.eps[q]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return frozenset(seen)

    def step(self, states, symbol: str) -> frozenset:
        nxt = set()
        for q in states:
            nxt.update(self.moves[q].get(symbol, ()))
        return self.closure(nxt)

    def start(self) -> frozenset:
        return self.closure(self.initial)

    def accepts(self, w: Sequence[str]) -> bool:
        current = self.start()
        for s in self.alphabet.check(w):
            current = self.step(current, s)
            if not current:
                return False
        return bool(current & self.accepting)

    def prefix_mask(self, w: Sequence[str]) -> list:
        """``mask[i]`` is True iff ``w[:i]`` is accepted."""
        current = self.start()
        mask = [bool(current & self.accepting)]
        for s in w:
            current = self.step(current, s) if current else current
            mask.append(bool(current & self.accepting))
        return mask


def regex_to_nfa(e: Regex, alphabet: Alphabet) -> Nfa:
    """Thompson construction."""
    moves: list = []
    eps: list = []

    def new() -> int:
        moves.append({})
        eps.append(set())
        return len(moves) - 1

    def build(node) -> tuple:
        s, f = new(), new()
        if isinstance(node, EmptySet):
            pass
        elif isinstance(node, Epsilon):
            eps[s].add(f)
        elif isinstance(node, Sym):
            if node.symbol not in alphabet:
                raise InputError(f"regex symbol {node.symbol!r} not in alphabet")
            moves[s].setdefault(node.symbol, set()).add(f)
        elif isinstance(node, Concat):
            s1, f1 = build(node.left)
            s2, f2 = build(node.right)
            eps[s].add(s1)
            eps[f1].add(s2)
            eps[f2].add(f)
        elif isinstance(node, Alt):
            for part in (node.left, node.right):
                s1, f1 = build(part)
                eps[s].add(s1)
                eps[f1].add(f)
        elif isinstance(node, Star):
            s1, f1 = build(node.inner)
            eps[s].update((s1, f))
            eps[f1].update((s1, f))
        else:
            raise TypeError(f"not a regex node: {node!r}")
        return s, f

    s, f = build(e)
    return Nfa(
        alphabet,
        len(moves),
        frozenset([s]),
        frozenset([f]),
        tuple({a: frozenset(t) for a, t in m.items()} for m in moves),
        tuple(frozenset(x) for x in eps),
    )


@lru_cache(maxsize=512)
def compiled(e: Regex, alphabet: Alphabet) -> Nfa:
    return regex_to_nfa(e, alphabet)


def _product_search(d: Dfa, nfa: Nfa, starts, goal, collect=False):
    """BFS over (DFA states..., NFA state) tuples.

    ``starts`` is a tuple of DFA states tracked in lockstep.  With
    ``collect`` every reachable node is returned with its parent map;
    otherwise the first word whose node satisfies ``goal`` (or None).
    """
    k = len(d.alphabet)
    symbols = d.alphabet.symbols
    roots = [tuple(starts) + (n,) for n in sorted(nfa.start())]
    parent = {r: None for r in roots}
    queue = deque(roots)
    if not collect:
        for r in roots:
            if goal(r):
                return ()
    while queue:
        node = queue.popleft()
        qs, n = node[:-1], node[-1]
        for i in range(k):
            targets = nfa.moves[n].get(symbols[i])
            if not targets:
                continue
            nqs = tuple(d.delta[q][i] for q in qs)
            for t in sorted(nfa.closure(targets)):
                nxt = nqs + (t,)
                if nxt in parent:
                    continue
                parent[nxt] = (node, i)
                if not collect and goal(nxt):
                    return _path(parent, nxt, symbols)
                queue.append(nxt)
    return parent if collect else None


def _check_alphabet(d: Dfa, e: Regex):
    extra = symbols_of(e) - set(d.alphabet.symbols)
    if extra:
        raise InputError(f"regex symbols {sorted(extra)} not in the automaton alphabet")


def reach_words(d: Dfa, e: Regex) -> dict:
    """For each state reachable by a word of L(e), the shortest such word."""
    _check_alphabet(d, e)
    nfa = compiled(e, d.alphabet)
    parent = _product_search(d, nfa, (d.initial,), None, collect=True)
    found = {}
    # parent preserves BFS insertion order, so the first hit per state is shortest
    for node in parent:
        q, n = node
        if n in nfa.accepting and q not in found:
            found[q] = _path(parent, node, d.alphabet.symbols)
    return found


def states_reachable_via(d: Dfa, e: Regex) -> frozenset:
    return frozenset(reach_words(d, e))


def distinguished_within(d: Dfa, q1: int, q2: int, e: Regex) -> Optional[Word]:
    """Shortest y in L(e) on which exactly one of ``q1``, ``q2`` accepts."""
    _check_alphabet(d, e)
    nfa = compiled(e, d.alphabet)
    acc, fin = d.accepting, nfa.accepting

    def goal(node):
        p1, p2, n = node
        return n in fin and ((p1 in acc) != (p2 in acc))

    return _product_search(d, nfa, (q1, q2), goal)
