"""Simulated teacher answering queries from a known DFA or Mealy machine."""
from __future__ import annotations

from typing import Optional, Sequence

from .automata import Dfa, MealyMachine, last_output, mealy_counterexample, shortest_counterexample
from .errors import InputError
from .learner import QueryStats
from .words import Word


class SimulatedTeacher:
    """Counts every membership/equivalence call.

    With ``shadow_mode`` the advice layer may call :meth:`verify` on inferred
    answers; verification is not counted and mismatches are recorded.
    """

    def __init__(self, target, shadow_mode: bool = False):
        if not isinstance(target, (Dfa, MealyMachine)):
            raise InputError("target must be a Dfa or MealyMachine")
        self.target = target
        self.shadow_mode = shadow_mode
        self.stats = QueryStats()
        self.mismatches: list = []
        self.verified = 0

    @property
    def alphabet(self):
        return self.target.alphabet

    @property
    def is_mealy(self) -> bool:
        return isinstance(self.target, MealyMachine)

    def _answer(self, w: Word):
        if self.is_mealy:
            return last_output(self.target, w)
        t = self.target
        return t.run_from(t.initial, t.alphabet.check(w)) in t.accepting

    def membership(self, w: Sequence[str]):
        """Membership for a DFA target, last output letter for a Mealy target."""
        answer = self._answer(tuple(w))
        self.stats.mq_asked += 1
        return answer

    def last_output(self, w: Sequence[str]) -> str:
        if not self.is_mealy:
            raise InputError("last-output queries need a Mealy target")
        return self.membership(w)

    def equivalence(self, h) -> Optional[Word]:
        """None if ``h`` is equivalent to the target, else a shortest counterexample."""
        self.stats.eq_asked += 1
        if self.is_mealy:
            cex = mealy_counterexample(h, self.target)
        else:
            cex = shortest_counterexample(h, self.target)
        if cex is not None:
            assert self._hyp_value(h, cex) != self._answer(cex)
        return cex

    @staticmethod
    def _hyp_value(h, w):
        if isinstance(h, MealyMachine):
            return last_output(h, w)
        return h.accepts(w)

    def verify(self, w: Sequence[str], claimed) -> bool:
        """Uncounted check of an inferred membership answer."""
        w = tuple(w)
        ok = self._answer(w) == claimed
        self.verified += 1
        if not ok:
            self.mismatches.append(("membership", w, claimed))
        return ok

    def verify_counterexample(self, h, w: Sequence[str]) -> bool:
        """Uncounted check that an inferred counterexample really separates ``h``."""
        w = tuple(w)
        ok = self._hyp_value(h, w) != self._answer(w)
        self.verified += 1
        if not ok:
            self.mismatches.append(("equivalence", w, None))
        return ok


def teacher_membership(t: SimulatedTeacher, w) -> bool:
    return t.membership(w)


def teacher_equivalence(t: SimulatedTeacher, h) -> Optional[Word]:
    return t.equivalence(h)


def teacher_last_output(t: SimulatedTeacher, w) -> str:
    return t.last_output(w)
