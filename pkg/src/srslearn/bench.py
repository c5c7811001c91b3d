"""Paired-trial benchmark: the same target learned with and without advice."""
from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from statistics import mean
from typing import Callable, Optional

from .advice import AdviceMode, AdvisedTeacher, find_witness
from .automata import Dfa, minimize, shortest_counterexample
from .errors import AdviceError, DivergenceError, InputError
from .generators import (
    bin_srs,
    bitadd_dfa,
    conv_srs,
    convolution,
    encode_partial_dfa,
    idempotent_srs,
    make_letter_idempotent,
    pattern_dfa,
    prune_transitions,
    random_dfa,
    random_pattern,
)
from .learner import LearnerConfig, QueryStats, lstar_learn, lstar_mealy
from .oracle import SimulatedTeacher
from .rng import SplitMix64
from .words import Alphabet

CSV_FIELDS = ["scenario", "trial", "seed", "target_states", "mq_plain", "eq_plain",
              "mq_advice_asked", "mq_advice_inferred", "eq_advice_asked", "eq_advice_inferred",
              "mq_decrease_pct", "eq_decrease_pct", "wall_ms"]

SIGMA4 = Alphabet(tuple("abcd"))
LEFT = Alphabet(tuple("abcd"))
RIGHT = Alphabet(tuple("efgh"))


@dataclass
class Instance:
    target: Dfa
    mode: AdviceMode


@dataclass
class RunRecord:
    target: str
    mode: str
    seed: int
    config: LearnerConfig
    stats: QueryStats
    teacher_stats: QueryStats
    learned_states: int
    wall_ms: float
    mismatches: int = 0

    def __post_init__(self):
        # every MQ the layer forwarded reached the teacher, and nothing else did
        assert self.stats.mq_asked == self.teacher_stats.mq_asked
        assert self.stats.eq_asked == self.teacher_stats.eq_asked


def _between(rng: SplitMix64, lo: int, hi: int) -> int:
    return rng.randint(lo, hi)


# -- scenarios -----------------------------------------------------------------------

def idempotent_instance(rng: SplitMix64, states=(100, 300)) -> Instance:
    d = random_dfa(_between(rng, *states), SIGMA4, 0.1, rng.fork())
    target = minimize(make_letter_idempotent(d, "a"))
    return Instance(target, AdviceMode.two_sided(idempotent_srs(SIGMA4, ("a",))))


def conv_pattern_instance(rng: SplitMix64, length: int = 10) -> Instance:
    d1 = pattern_dfa([random_pattern(length, LEFT, rng)], "any", LEFT)
    d2 = pattern_dfa([random_pattern(length, RIGHT, rng)], "any", RIGHT)
    target = convolution(d1, d2)
    return Instance(target, AdviceMode.two_sided(conv_srs(target.alphabet, LEFT, RIGHT)))


def _random_component(rng: SplitMix64, alphabet: Alphabet, states) -> Dfa:
    # resample until the minimal DFA keeps a size in range (rules out trivial languages)
    lo, hi = states
    for _ in range(1000):
        d = minimize(random_dfa(_between(rng, lo, hi), alphabet, 0.1, rng.fork()))
        if lo <= d.n_states <= hi:
            return d
    raise InputError(f"could not draw a component with {lo}..{hi} minimal states")


def conv_random_instance(rng: SplitMix64, states=(15, 30)) -> Instance:
    d1 = _random_component(rng, LEFT, states)
    d2 = _random_component(rng, RIGHT, states)
    target = convolution(d1, d2)
    return Instance(target, AdviceMode.two_sided(conv_srs(target.alphabet, LEFT, RIGHT)))


def conv_shared_instance(rng: SplitMix64, states=(15, 30)) -> Instance:
    left, right = Alphabet(tuple("abcd")), Alphabet(tuple("cdef"))
    d1 = _random_component(rng, left, states)
    d2 = _random_component(rng, right, states)
    target = convolution(d1, d2)
    return Instance(target, AdviceMode.two_sided(conv_srs(target.alphabet, left, right)))


def bitadd_instance(rng: SplitMix64) -> Instance:
    return Instance(minimize(bitadd_dfa()), AdviceMode.two_sided(bin_srs()))


def partial_csrs_instance(rng: SplitMix64, states=(100, 300), keep=(10, 20)) -> Instance:
    target = minimize(random_dfa(_between(rng, *states), SIGMA4, 0.1, rng.fork()))
    kept = min(_between(rng, *keep), target.n_states * len(SIGMA4))
    part = prune_transitions(target, kept, rng.fork())
    return Instance(target, AdviceMode.controlled(encode_partial_dfa(part)))


SCENARIOS: dict = {
    "idempotent": idempotent_instance,
    "conv-pattern": conv_pattern_instance,
    "conv-random": conv_random_instance,
    "conv-shared": conv_shared_instance,
    "bitadd": bitadd_instance,
    "partial-csrs": partial_csrs_instance,
}


def make_instance(scenario: str, seed: int) -> Instance:
    try:
        factory = SCENARIOS[scenario]
    except KeyError:
        raise InputError(f"unknown scenario {scenario!r}; choose from {sorted(SCENARIOS)}") from None
    return factory(SplitMix64(seed))


# -- runs --------------------------------------------------------------------------------

def learn(target, mode: AdviceMode, config: LearnerConfig = LearnerConfig(), seed: int = 0,
          shadow: bool = False, label: str = "") -> tuple:
    """One learning run through the advice layer; returns ``(learned, RunRecord)``."""
    teacher = SimulatedTeacher(target, shadow_mode=shadow)
    layer = AdvisedTeacher(teacher, mode, shadow=shadow)
    start = time.perf_counter()
    try:
        if isinstance(target, Dfa):
            learned, _ = lstar_learn(layer.membership, layer.equivalence, target.alphabet, config)
        else:
            learned, _ = lstar_mealy(layer.membership, layer.equivalence, target.alphabet, config,
                                     target.outputs)
    except DivergenceError as exc:
        exc.witness = layer.last_witness
        raise
    wall = (time.perf_counter() - start) * 1000
    record = RunRecord(label, mode.kind.value, seed, config, layer.stats, teacher.stats,
                       learned.n_states, wall, len(teacher.mismatches))
    return learned, record


def _pct(before: int, after: int) -> float:
    return 100.0 * (before - after) / before if before else 0.0


def run_trial(scenario: str, trial: int, seed: int,
              config: LearnerConfig = LearnerConfig(), timing: bool = True) -> dict:
    inst = make_instance(scenario, seed)
    witness = find_witness(inst.mode, inst.target)
    if witness is not None:
        raise AdviceError(f"{scenario} advice is inconsistent with its target: {witness}")
    start = time.perf_counter()
    plain, rec0 = learn(inst.target, AdviceMode.none(), config, seed)
    advised, rec1 = learn(inst.target, inst.mode, config, seed)
    wall = (time.perf_counter() - start) * 1000
    for learned in (plain, advised):
        if learned.n_states != inst.target.n_states or \
                shortest_counterexample(learned, inst.target) is not None:
            raise AssertionError(f"{scenario} trial {trial}: learned the wrong language")
    s0, s1 = rec0.stats, rec1.stats
    return {
        "scenario": scenario,
        "trial": trial,
        "seed": seed,
        "target_states": inst.target.n_states,
        "mq_plain": s0.mq_asked,
        "eq_plain": s0.eq_asked,
        "mq_advice_asked": s1.mq_asked,
        "mq_advice_inferred": s1.mq_inferred,
        "eq_advice_asked": s1.eq_asked,
        "eq_advice_inferred": s1.eq_inferred,
        "mq_decrease_pct": round(_pct(s0.mq_asked, s1.mq_asked), 2),
        "eq_decrease_pct": round(_pct(s0.eq_asked, s1.eq_asked), 2),
        "wall_ms": round(wall) if timing else 0,
    }


def _run_trial_args(args):
    return run_trial(*args)


def summarize(rows: list) -> list:
    """Min/max/mean of the two decrease columns, one row per statistic."""
    if not rows:
        return []
    out = []
    for name, fn in (("min", min), ("max", max), ("mean", mean)):
        row = {k: "" for k in CSV_FIELDS}
        row["scenario"] = rows[0]["scenario"]
        row["trial"] = name
        row["mq_decrease_pct"] = round(fn(r["mq_decrease_pct"] for r in rows), 2)
        row["eq_decrease_pct"] = round(fn(r["eq_decrease_pct"] for r in rows), 2)
        out.append(row)
    return out


def bench(scenario: str, trials: int, seed: int = 0, config: LearnerConfig = LearnerConfig(),
          jobs: int = 1, timing: bool = True, progress: Optional[Callable] = None) -> list:
    """Per-trial rows in trial order; trial ``i`` uses seed ``seed + i``."""
    if scenario not in SCENARIOS:
        raise InputError(f"unknown scenario {scenario!r}; choose from {sorted(SCENARIOS)}")
    if trials < 1:
        raise InputError("need at least one trial")
    args = [(scenario, i, seed + i, config, timing) for i in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_trial_args, args))
    else:
        rows = []
        for a in args:
            rows.append(run_trial(*a))
            if progress is not None:
                progress(rows[-1])
    return rows


def to_csv(rows: list, summary: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    if summary:
        writer.writerows(summarize(rows))
    return buf.getvalue()
