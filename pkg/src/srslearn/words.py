"""Alphabets and words.

Words are tuples of symbol tokens so that symbols such as ``(1,0,1)`` are
first-class; ``()`` is the empty word.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import InputError

Word = tuple  # tuple[str, ...]

EMPTY: Word = ()


@dataclass(frozen=True)
class Alphabet:
    """A finite, totally ordered set of whitespace-free tokens."""

    symbols: tuple
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        symbols = tuple(self.symbols)
        object.__setattr__(self, "symbols", symbols)
        if not symbols:
            raise InputError("alphabet must be non-empty")
        index = {}
        for i, s in enumerate(symbols):
            if not isinstance(s, str) or not s or any(ch.isspace() for ch in s):
                raise InputError(f"invalid symbol token {s!r}")
            if s in index:
                raise InputError(f"duplicate symbol {s!r}")
            index[s] = i
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self) -> Iterator[str]:
        return iter(self.symbols)

    def __contains__(self, symbol) -> bool:
        return symbol in self._index

    def index(self, symbol: str) -> int:
        try:
            return self._index[symbol]
        except KeyError:
            raise InputError(f"symbol {symbol!r} not in alphabet") from None

    def check(self, w: Sequence[str]) -> Word:
        """Return ``w`` as a tuple, raising InputError on a foreign symbol."""
        w = tuple(w)
        for s in w:
            if s not in self._index:
                raise InputError(f"symbol {s!r} not in alphabet {list(self.symbols)}")
        return w

    def key(self, w: Sequence[str]) -> tuple:
        """Shortlex sort key: length first, then alphabet order."""
        return (len(w), tuple(self._index[s] for s in w))

    def words(self, max_len: int) -> Iterator[Word]:
        """All words up to ``max_len`` in shortlex order."""
        layer = [()]
        for n in range(max_len + 1):
            yield from layer
            if n < max_len:
                layer = [w + (a,) for w in layer for a in self.symbols]

    def union(self, other: "Alphabet") -> "Alphabet":
        return Alphabet(self.symbols + tuple(s for s in other.symbols if s not in self))

    @classmethod
    def of(cls, symbols: Iterable[str] | str) -> "Alphabet":
        if isinstance(symbols, str):
            symbols = symbols.split()
        return cls(tuple(symbols))


def word(text: str | Sequence[str]) -> Word:
    """Parse a space-separated word; ``""``, ``"_"`` and ``"~"`` are empty."""
    if not isinstance(text, str):
        return tuple(text)
    parts = text.split()
    if parts in (["_"], ["~"]):
        return ()
    return tuple(parts)


def show(w: Sequence[str]) -> str:
    return " ".join(w) if w else "_"
