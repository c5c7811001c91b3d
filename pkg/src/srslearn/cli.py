"""``srslearn`` command line: learn, check, normalize, gen, bench."""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from . import generators as gen
from .advice import AdviceKind, AdviceMode, find_witness
from .automata import Dfa, MealyMachine, minimize
from .bench import SCENARIOS, bench, learn, to_csv
from .errors import AdviceError, DivergenceError, InputError
from .fileformats import (
    read_automaton,
    read_rewriting,
    serialize_automaton,
    serialize_csrs,
    serialize_srs,
)
from .learner import CexProcessing, InitialTests, LearnerConfig
from .rewriting import Csrs, Srs, normal_form_with_trace
from .words import Alphabet, show, word

EXIT_OK, EXIT_WITNESS, EXIT_USAGE, EXIT_ADVICE = 0, 1, 2, 3

MODES = {
    "none": AdviceKind.NONE,
    "two-sided": AdviceKind.TWO_SIDED,
    "csrs": AdviceKind.TWO_SIDED_CONTROLLED,
    "positive": AdviceKind.POSITIVE,
    "negative": AdviceKind.NEGATIVE,
    "upward": AdviceKind.UPWARD_CLOSED,
}
INIT_TESTS = {"epsilon": InitialTests.EPSILON_ONLY, "alphabet": InitialTests.EPSILON_PLUS_ALPHABET}
CEX = {"prefixes": CexProcessing.ALL_PREFIXES, "suffixes": CexProcessing.ALL_SUFFIXES}


def _write(text: str, path: Optional[str]):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _config(args) -> LearnerConfig:
    return LearnerConfig(initial_tests=INIT_TESTS[args.init_tests], cex_processing=CEX[args.cex])


def _mode(args, target) -> AdviceMode:
    """Build the advice mode from --mode and the optional advice file."""
    system = read_rewriting(args.advice, target.alphabet) if args.advice else None
    name = args.mode
    if name is None:
        name = "none" if system is None else ("csrs" if isinstance(system, Csrs) else "two-sided")
    kind = MODES[name]
    if kind is AdviceKind.NONE:
        if system is not None:
            raise InputError("an advice file was given with --mode none")
        return AdviceMode.none()
    if kind is AdviceKind.UPWARD_CLOSED:
        return AdviceMode.upward_closed(target.alphabet)
    if system is None:
        raise InputError(f"--mode {name} needs an advice file")
    if kind is AdviceKind.TWO_SIDED_CONTROLLED and isinstance(system, Srs):
        system = Csrs.from_srs(system)
    if kind is not AdviceKind.TWO_SIDED_CONTROLLED and isinstance(system, Csrs):
        plain = system.plain()
        if plain is None:
            raise InputError(f"--mode {name} needs a plain system; this file has contexts")
        system = plain
    kw = {"assume_convergent": True} if getattr(args, "assume_convergent", False) else {}
    return AdviceMode(kind, system, **kw)


# -- subcommands -------------------------------------------------------------------------

def cmd_learn(args) -> int:
    target = read_automaton(args.target, args.complete_with_sink)
    mode = _mode(args, target)
    config = _config(args)
    try:
        learned, record = learn(target, mode, config, args.seed, shadow=args.shadow,
                                label=args.target)
    except DivergenceError as exc:
        witness = getattr(exc, "witness", None)
        hint = f" (last advice witness {witness})" if witness is not None else ""
        print(f"error: learning diverged: {exc}{hint}", file=sys.stderr)
        return EXIT_ADVICE
    text = serialize_automaton(learned)
    info = {
        "target": args.target,
        "mode": record.mode,
        "seed": args.seed,
        "init_tests": config.initial_tests.value,
        "cex": config.cex_processing.value,
        "learned_states": record.learned_states,
        **record.stats.as_dict(),
        "wall_ms": round(record.wall_ms, 1),
    }
    if args.shadow:
        info["soundness_violations"] = record.mismatches
    if args.out:
        _write(text, args.out)
    else:
        sys.stdout.write(text)
    print("# run " + json.dumps(info, sort_keys=True))
    if args.stats:
        for key in ("mq_asked", "mq_inferred", "eq_asked", "eq_inferred"):
            print(f"# {key}: {info[key]}")
    if args.shadow and record.mismatches:
        print(f"error: {record.mismatches} inferred answers disagreed with the teacher",
              file=sys.stderr)
        return EXIT_ADVICE
    return EXIT_OK


def cmd_check(args) -> int:
    target = read_automaton(args.target, args.complete_with_sink)
    args.assume_convergent = True  # checking does not need normal forms
    mode = _mode(args, target)
    if mode.kind is AdviceKind.NONE:
        raise InputError("check needs an advice file or --mode upward")
    witness = find_witness(mode, target)
    if witness is None:
        print("Consistent")
        return EXIT_OK
    print(f"Witness: {show(witness.x)} / {show(witness.y)}")
    return EXIT_WITNESS


def cmd_normalize(args) -> int:
    alphabet = Alphabet.of(args.alphabet) if args.alphabet else None
    system = read_rewriting(args.advice, alphabet)
    w = word(" ".join(args.word))
    nf, trace = normal_form_with_trace(system, w)
    print(show(nf))
    current = list(w)
    for pos, idx in trace:
        rule = system.rules[idx]
        current = current[:pos] + list(rule.rhs) + current[pos + len(rule.lhs):]
        print(f"  {pos} {show(rule.lhs)} -> {show(rule.rhs)}: {show(current)}")
    return EXIT_OK


def _alphabet_arg(text: str) -> Alphabet:
    return Alphabet.of(text)


def cmd_gen(args) -> int:
    kind = args.kind
    if kind == "random-dfa":
        d = gen.random_dfa(args.states, _alphabet_arg(args.alphabet), args.accept_prob, args.seed)
        if args.idempotent:
            d = gen.make_letter_idempotent(d, args.idempotent)
        out = serialize_automaton(minimize(d) if args.minimize else d)
    elif kind == "pattern":
        alphabet = _alphabet_arg(args.alphabet)
        patterns = [word(p) for p in args.pattern]
        out = serialize_automaton(gen.pattern_dfa(patterns, "all" if args.all else "any", alphabet))
    elif kind == "subsequence":
        alphabet = _alphabet_arg(args.alphabet)
        out = serialize_automaton(gen.subsequence_dfa([word(p) for p in args.pattern], alphabet))
    elif kind == "convolution":
        d1, d2 = read_automaton(args.left), read_automaton(args.right)
        if not isinstance(d1, Dfa) or not isinstance(d2, Dfa):
            raise InputError("convolution needs two DFA files")
        out = serialize_automaton(gen.convolution(d1, d2))
    elif kind == "bitadd":
        out = serialize_automaton(gen.bitadd_dfa())
    elif kind == "srs-idempotent":
        out = serialize_srs(gen.idempotent_srs(_alphabet_arg(args.alphabet), word(args.word)))
    elif kind == "srs-commutation":
        pairs = [tuple(p.split(",")) for p in args.pairs]
        if any(len(p) != 2 for p in pairs):
            raise InputError("pairs are written a,b")
        out = serialize_srs(gen.commutation_srs(_alphabet_arg(args.alphabet), pairs))
    elif kind == "srs-conv":
        left, right = _alphabet_arg(args.left), _alphabet_arg(args.right)
        out = serialize_srs(gen.conv_srs(left.union(right), left, right))
    elif kind == "srs-bin":
        out = serialize_srs(gen.bin_srs())
    elif kind == "srs-sync":
        out = serialize_srs(gen.sync_srs(_alphabet_arg(args.alphabet), word(args.word)))
    elif kind == "srs-upward":
        out = serialize_srs(gen.upward_srs(_alphabet_arg(args.alphabet)))
    elif kind == "csrs-partial":
        d = read_automaton(args.target)
        if not isinstance(d, Dfa):
            raise InputError("csrs-partial needs a DFA file")
        keep = args.keep if args.keep is not None else d.n_states * len(d.alphabet)
        out = serialize_csrs(gen.encode_partial_dfa(gen.prune_transitions(d, keep, args.seed)))
    else:  # pragma: no cover - argparse restricts choices
        raise InputError(f"unknown generator {kind!r}")
    _write(out, args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    def progress(row):
        if args.verbose:
            print(f"trial {row['trial']}: mq {row['mq_decrease_pct']}% eq {row['eq_decrease_pct']}%",
                  file=sys.stderr)

    rows = bench(args.scenario, args.trials, args.seed, _config(args), args.jobs,
                 timing=not args.no_timing, progress=progress)
    _write(to_csv(rows), args.out)
    return EXIT_OK


# -- parser ----------------------------------------------------------------------------

def _learner_flags(p):
    p.add_argument("--init-tests", choices=sorted(INIT_TESTS), default="alphabet",
                   help="initial test set: just the empty word, or it plus every letter")
    p.add_argument("--cex", choices=sorted(CEX), default="prefixes",
                   help="add counterexample prefixes as selectors or suffixes as tests")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="srslearn",
                                     description="L* learning with string rewriting advice")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="learn a target automaton through the advice layer")
    p.add_argument("target")
    p.add_argument("advice", nargs="?")
    p.add_argument("--mode", choices=list(MODES))
    p.add_argument("--seed", type=int, default=0, help="recorded in the run line")
    _learner_flags(p)
    p.add_argument("--shadow", action="store_true", help="verify every inferred answer")
    p.add_argument("--out", help="write the learned automaton here")
    p.add_argument("--stats", action="store_true", help="print query counts")
    p.add_argument("--assume-convergent", action="store_true",
                   help="use membership inference even when convergence is not proved")
    p.add_argument("--complete-with-sink", action="store_true")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("check", help="check advice against an automaton")
    p.add_argument("target")
    p.add_argument("advice", nargs="?")
    p.add_argument("--mode", choices=list(MODES))
    p.add_argument("--complete-with-sink", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("normalize", help="print a normal form and its rewrite trace")
    p.add_argument("advice")
    p.add_argument("word", nargs="*", help="space-separated symbols; '_' is the empty word")
    p.add_argument("--alphabet", help="alphabet if the file has no header")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("gen", help="write a generated automaton or rewriting system")
    p.add_argument("kind", choices=["random-dfa", "pattern", "subsequence", "convolution", "bitadd",
                                    "srs-idempotent", "srs-commutation", "srs-conv", "srs-bin",
                                    "srs-sync", "srs-upward", "csrs-partial"])
    p.add_argument("--alphabet", default="a b c d")
    p.add_argument("--states", type=int, default=10)
    p.add_argument("--accept-prob", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--idempotent", metavar="LETTER", help="patch the DFA so LETTER is idempotent")
    p.add_argument("--minimize", action="store_true")
    p.add_argument("--pattern", action="append", default=[], help="repeatable; e.g. 'a b a'")
    p.add_argument("--all", action="store_true", help="require every pattern, not any")
    p.add_argument("--left", help="automaton file (convolution) or alphabet (srs-conv)")
    p.add_argument("--right", help="automaton file (convolution) or alphabet (srs-conv)")
    p.add_argument("--word", default="a")
    p.add_argument("--pairs", nargs="*", default=[], help="independent pairs a,b")
    p.add_argument("--target", help="DFA file for csrs-partial")
    p.add_argument("--keep", type=int, help="transitions kept by csrs-partial")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="paired trials with and without advice, as CSV")
    p.add_argument("scenario", choices=sorted(SCENARIOS))
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0, help="trial i uses seed + i")
    p.add_argument("--jobs", type=int, default=1)
    _learner_flags(p)
    p.add_argument("--no-timing", action="store_true", help="write 0 for wall_ms")
    p.add_argument("--out")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AdviceError, DivergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ADVICE
    except (InputError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
