"""String rewriting: plain and controlled systems, normal forms, and a
best-effort convergence check (shortlex termination + critical pairs)."""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

from .errors import InputError, NonTerminationError
from .nfa import Regex, compiled, is_epsilon, is_universal, reverse, sigma_star
from .words import Alphabet, Word, show


@dataclass(frozen=True)
class RewriteRule:
    lhs: Word
    rhs: Word

    def __post_init__(self):
        object.__setattr__(self, "lhs", tuple(self.lhs))
        object.__setattr__(self, "rhs", tuple(self.rhs))
        if self.lhs == self.rhs:
            raise InputError(f"rule {self} rewrites a word to itself")

    def __str__(self):
        return f"{show(self.lhs)} -> {show(self.rhs)}"


@dataclass(frozen=True)
class ControlledRule:
    lhs: Word
    rhs: Word
    prefix_ctx: Regex
    suffix_ctx: Regex

    def __post_init__(self):
        object.__setattr__(self, "lhs", tuple(self.lhs))
        object.__setattr__(self, "rhs", tuple(self.rhs))
        if self.lhs == self.rhs:
            raise InputError(f"rule {show(self.lhs)} -> {show(self.rhs)} rewrites a word to itself")


def _check_rule_symbols(alphabet: Alphabet, lhs, rhs):
    alphabet.check(lhs)
    alphabet.check(rhs)


@dataclass(frozen=True)
class Srs:
    alphabet: Alphabet
    rules: tuple
    one_sided: bool = False

    def __post_init__(self):
        rules = tuple(r if isinstance(r, RewriteRule) else RewriteRule(*r) for r in self.rules)
        object.__setattr__(self, "rules", rules)
        for r in rules:
            _check_rule_symbols(self.alphabet, r.lhs, r.rhs)
            if not r.lhs and not self.one_sided:
                raise InputError(
                    f"empty left-hand side in {r}: only allowed in one-sided systems")

    @cached_property
    def _engine(self) -> "_Engine":
        return _Engine(self.alphabet, [(r.lhs, r.rhs, None, None) for r in self.rules])

    def size(self) -> int:
        return sum(len(r.lhs) + len(r.rhs) for r in self.rules)

    def __str__(self):
        return "\n".join(str(r) for r in self.rules)


@dataclass(frozen=True)
class Csrs:
    alphabet: Alphabet
    rules: tuple

    def __post_init__(self):
        rules = tuple(r if isinstance(r, ControlledRule) else ControlledRule(*r) for r in self.rules)
        object.__setattr__(self, "rules", rules)
        for r in rules:
            _check_rule_symbols(self.alphabet, r.lhs, r.rhs)
            compiled(r.prefix_ctx, self.alphabet)
            compiled(r.suffix_ctx, self.alphabet)

    @classmethod
    def from_srs(cls, srs: Srs) -> "Csrs":
        top = sigma_star(srs.alphabet)
        return cls(srs.alphabet, tuple(ControlledRule(r.lhs, r.rhs, top, top) for r in srs.rules))

    @cached_property
    def _engine(self) -> "_Engine":
        return _Engine(self.alphabet, [(r.lhs, r.rhs, r.prefix_ctx, r.suffix_ctx) for r in self.rules])

    def size(self) -> int:
        return sum(len(r.lhs) + len(r.rhs) for r in self.rules)

    def plain(self) -> Optional[Srs]:
        """The equivalent plain system if every context is Sigma*."""
        if all(is_universal(r.prefix_ctx, self.alphabet) and is_universal(r.suffix_ctx, self.alphabet)
               for r in self.rules):
            return Srs(self.alphabet, tuple(RewriteRule(r.lhs, r.rhs) for r in self.rules))
        return None


class _Context:
    """Per-word evaluation of one regex context, with fast paths."""

    def __init__(self, e: Optional[Regex], alphabet: Alphabet, side: str):
        self.side = side
        if e is None or is_universal(e, alphabet):
            self.kind = "all"
        elif is_epsilon(e):
            self.kind = "eps"
        else:
            self.kind = "nfa"
            self.nfa = compiled(e if side == "prefix" else reverse(e), alphabet)

    def mask(self, w: list) -> Optional[list]:
        if self.kind == "all":
            return None
        n = len(w)
        if self.kind == "eps":
            m = [False] * (n + 1)
            m[0 if self.side == "prefix" else n] = True
            return m
        if self.side == "prefix":
            return self.nfa.prefix_mask(w)
        rmask = self.nfa.prefix_mask(w[::-1])
        return [rmask[n - j] for j in range(n + 1)]


class _Engine:
    """Leftmost-position, first-rule rewriting over token lists."""

    def __init__(self, alphabet: Alphabet, rules: list):
        self.alphabet = alphabet
        self.rules = [(list(l), list(r)) for l, r, _, _ in rules]
        self.prefix = [_Context(p, alphabet, "prefix") for _, _, p, _ in rules]
        self.suffix = [_Context(s, alphabet, "suffix") for _, _, _, s in rules]
        self.controlled = any(c.kind != "all" for c in self.prefix + self.suffix)
        self.suffix_free = all(c.kind == "all" for c in self.suffix)
        self.max_lhs = max((len(l) for l, _ in self.rules), default=0)
        self.size = sum(len(l) + len(r) for l, r in self.rules)
        empty = [i for i, (l, _) in enumerate(self.rules) if not l]
        self.at_end = empty
        by_first = {}
        for a in alphabet:
            by_first[a] = sorted(empty + [i for i, (l, _) in enumerate(self.rules) if l and l[0] == a])
        self.by_first = by_first
        # candidates keyed by the next two symbols; lhs lengths <= 2 need no further test
        by_pair = {}
        for a in alphabet:
            for b in alphabet:
                by_pair[a, b] = [(idx, self.rules[idx][0], len(self.rules[idx][0]))
                                 for idx in by_first[a]
                                 if len(self.rules[idx][0]) < 2 or self.rules[idx][0][1] == b]
        self.by_pair = by_pair
        self.by_single = {a: [(idx, self.rules[idx][0], len(self.rules[idx][0]))
                              for idx in by_first[a] if len(self.rules[idx][0]) < 2]
                          for a in alphabet}
        self.at_end_c = [(idx, [], 0) for idx in empty]
        # pure commutation systems: appending a letter only moves it left
        swaps = {tuple(l) for l, r in self.rules if len(l) == 2 and r == l[::-1]}
        self.swaps = swaps if (not self.controlled and len(swaps) == len(self.rules)
                               and not any((b, a) in swaps for a, b in swaps)) else None
        by_last = {a: [] for a in alphabet}
        for l, _ in self.rules:
            if l:
                by_last[l[-1]].append(tuple(l[:-1]))
        self.by_last = by_last

    def _masks(self, w):
        if not self.controlled:
            return None
        cache = {}

        def mask(ctx):
            if ctx.kind == "all":
                return None
            key = (ctx.side, ctx.kind, id(ctx.nfa) if ctx.kind == "nfa" else None)
            if key not in cache:
                cache[key] = ctx.mask(w)
            return cache[key]

        return [mask(p) for p in self.prefix], [mask(s) for s in self.suffix]

    def redexes(self, w: list):
        """All ``(position, rule index)`` pairs applicable to ``w``."""
        masks = self._masks(w)
        n = len(w)
        out = []
        for i in range(n + 1):
            cands = self.by_first[w[i]] if i < n else self.at_end
            for idx in cands:
                if self._applies(w, i, idx, masks):
                    out.append((i, idx))
        return out

    def _applies(self, w, i, idx, masks) -> bool:
        lhs = self.rules[idx][0]
        end = i + len(lhs)
        if end > len(w) or w[i:end] != lhs:
            return False
        if masks is not None:
            pm, sm = masks[0][idx], masks[1][idx]
            if pm is not None and not pm[i]:
                return False
            if sm is not None and not sm[end]:
                return False
        return True

    def apply(self, w: list, i: int, idx: int) -> list:
        lhs, rhs = self.rules[idx]
        return w[:i] + rhs + w[i + len(lhs):]

    def single_step(self, w: Sequence[str]) -> frozenset:
        w = list(self.alphabet.check(w))
        return frozenset(tuple(self.apply(w, i, idx)) for i, idx in self.redexes(w))

    def default_budget(self, n: int) -> int:
        return 10 * (n + 1) * (self.size + 1)

    def normalize(self, w: Sequence[str], step_budget: Optional[int] = None, trace=None,
                  start: int = 0) -> Word:
        """Fixed-strategy normal form; ``start`` skips a prefix known to hold no redex."""
        w = list(self.alphabet.check(w))
        budget = self.default_budget(len(w)) if step_budget is None else step_budget
        steps = 0
        pos = start
        restart_back = self.max_lhs - 1 if self.suffix_free else None
        by_pair, by_single, at_end, rules = self.by_pair, self.by_single, self.at_end_c, self.rules
        masks = self._masks(w)
        while True:
            n = len(w)
            hit = None
            i = pos
            while i <= n and hit is None:
                if i < n - 1:
                    cands = by_pair[w[i], w[i + 1]]
                elif i == n - 1:
                    cands = by_single[w[i]]
                else:
                    cands = at_end
                for idx, lhs, k in cands:
                    if (k <= 2 or (i + k <= n and w[i:i + k] == lhs)) and (
                            masks is None or self._applies(w, i, idx, masks)):
                        hit = i, idx, k
                        break
                i += 1
            if hit is None:
                return tuple(w)
            if steps >= budget:
                raise NonTerminationError(
                    f"no normal form within {budget} steps (current word {show(w)})")
            i, idx, k = hit
            w[i:i + k] = rules[idx][1]
            steps += 1
            if trace is not None:
                trace.append((i, idx))
            pos = 0 if restart_back is None else max(0, i - restart_back)
            if masks is not None:
                masks = self._masks(w)

    def extend(self, nf: Word, symbol: str) -> Word:
        """Normal form of ``nf + symbol`` for an irreducible ``nf``.

        Only valid without suffix constraints: appending cannot then create a
        redex that ends before the new letter.
        """
        if self.swaps is not None:
            i = len(nf)
            while i and (nf[i - 1], symbol) in self.swaps:
                i -= 1
            return nf[:i] + (symbol,) + nf[i:]
        w = nf + (symbol,)
        # a new redex must end at the appended letter; contexts are left to normalize
        m = len(nf)
        if any(len(head) <= m and nf[m - len(head):] == head for head in self.by_last[symbol]):
            return self.normalize(w, start=max(0, m + 1 - self.max_lhs))
        return w


# -- public operations -------------------------------------------------------

def single_step(r: Srs, w: Sequence[str]) -> frozenset:
    """Every word reachable from ``w`` by one rule application."""
    return r._engine.single_step(w)


def normal_form(r: Srs, w: Sequence[str], step_budget: Optional[int] = None) -> Word:
    return r._engine.normalize(w, step_budget)


def normal_form_with_trace(r, w: Sequence[str], step_budget: Optional[int] = None):
    """Normal form plus the applied ``(position, rule index)`` steps."""
    trace = []
    nf = r._engine.normalize(w, step_budget, trace)
    return nf, trace


def replay(r, w: Sequence[str], trace) -> Word:
    """Re-apply a recorded trace, validating that every step is a legal redex."""
    engine = r._engine
    current = list(engine.alphabet.check(w))
    for i, idx in trace:
        if not engine._applies(current, i, idx, engine._masks(current)):
            raise InputError(f"step ({i}, {idx}) does not apply to {show(current)}")
        current = engine.apply(current, i, idx)
    return tuple(current)


def csrs_single_step(c: Csrs, w: Sequence[str]) -> frozenset:
    return c._engine.single_step(w)


def csrs_normal_form(c: Csrs, w: Sequence[str], step_budget: Optional[int] = None) -> Word:
    return c._engine.normalize(w, step_budget)


def random_normal_form(r, w: Sequence[str], rng, step_budget: Optional[int] = None) -> Word:
    """Rewrite with a random redex each step; ``rng`` needs ``randbelow``."""
    engine = r._engine
    w = list(engine.alphabet.check(w))
    budget = engine.default_budget(len(w)) if step_budget is None else step_budget
    for _ in range(budget + 1):
        options = engine.redexes(w)
        if not options:
            return tuple(w)
        i, idx = options[rng.randbelow(len(options))]
        w = engine.apply(w, i, idx)
    raise NonTerminationError(f"no normal form within {budget} steps")


# -- convergence ----------------------------------------------------------------

class Status(str, enum.Enum):
    PROVED = "proved"
    REFUTED = "refuted"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class ConvergenceVerdict:
    termination: Status
    local_confluence: Status
    convergent: Status
    critical_pair: Optional[tuple] = field(default=None)

    def __str__(self):
        text = (f"termination={self.termination.value} "
                f"local_confluence={self.local_confluence.value} "
                f"convergent={self.convergent.value}")
        if self.critical_pair is not None:
            w, t1, t2 = self.critical_pair
            text += f" critical_pair=({show(w)}: {show(t1)} / {show(t2)})"
        return text


def shortlex_decreasing(alphabet: Alphabet, lhs: Word, rhs: Word) -> bool:
    return alphabet.key(lhs) > alphabet.key(rhs)


def critical_pairs(r: Srs):
    """Yield ``(overlap word, result 1, result 2)`` for all overlaps and containments."""
    rules = r.rules
    for i, r1 in enumerate(rules):
        l1 = r1.lhs
        for j, r2 in enumerate(rules):
            l2 = r2.lhs
            for k in range(1, min(len(l1), len(l2))):
                if l1[-k:] == l2[:k]:
                    w = l1 + l2[k:]
                    yield w, r1.rhs + l2[k:], l1[:-k] + r2.rhs
            if i != j and len(l2) <= len(l1):
                for p in range(len(l1) - len(l2) + 1):
                    if l1[p:p + len(l2)] == l2:
                        yield l1, r1.rhs, l1[:p] + r2.rhs + l1[p + len(l2):]


def _descendants(r: Srs, w: Word, cap: int) -> Optional[set]:
    seen = {w}
    queue = deque([w])
    while queue:
        for t in single_step(r, queue.popleft()):
            if t not in seen:
                seen.add(t)
                if len(seen) > cap:
                    return None
                queue.append(t)
    return seen


def _join(r: Srs, t1: Word, t2: Word, cap: int) -> Status:
    if t1 == t2:
        return Status.PROVED
    try:
        if normal_form(r, t1) == normal_form(r, t2):
            return Status.PROVED
    except NonTerminationError:
        pass
    d1 = _descendants(r, t1, cap)
    d2 = _descendants(r, t2, cap)
    if d1 is not None and d2 is not None:
        return Status.PROVED if d1 & d2 else Status.REFUTED
    return Status.UNKNOWN


def check_convergence(r, descendant_cap: int = 5000) -> ConvergenceVerdict:
    """Termination by shortlex decrease, local confluence by critical pairs.

    Controlled systems are handled when every context is Sigma* (reduced to
    the plain case) or when every rule is anchored at the word start and no
    left-hand side is a prefix of another (at most one redex per word).
    """
    alphabet = r.alphabet
    rules = r.rules
    terminating = all(shortlex_decreasing(alphabet, x.lhs, x.rhs) for x in rules)
    termination = Status.PROVED if terminating else Status.UNKNOWN

    if isinstance(r, Csrs):
        plain = r.plain()
        if plain is None:
            anchored = all(is_epsilon(x.prefix_ctx) for x in rules)
            prefix_free = not any(
                i != j and x.lhs[:len(y.lhs)] == y.lhs
                for i, x in enumerate(rules) for j, y in enumerate(rules))
            local = Status.PROVED if anchored and prefix_free else Status.UNKNOWN
            return _verdict(termination, local, None)
        r = plain

    if any(not x.lhs for x in rules):
        return _verdict(termination, Status.UNKNOWN, None)

    local = Status.PROVED
    witness = None
    for w, t1, t2 in critical_pairs(r):
        status = _join(r, t1, t2, descendant_cap)
        if status is Status.REFUTED:
            return _verdict(termination, Status.REFUTED, (w, t1, t2))
        if status is Status.UNKNOWN and local is Status.PROVED:
            local, witness = Status.UNKNOWN, (w, t1, t2)
    return _verdict(termination, local, witness)


def _verdict(termination, local, pair) -> ConvergenceVerdict:
    ok = termination is Status.PROVED and local is Status.PROVED
    return ConvergenceVerdict(termination, local, Status.PROVED if ok else Status.UNKNOWN, pair)
