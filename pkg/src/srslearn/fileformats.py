"""Line-based text formats for automata, rewriting systems and regexes.

Automaton files::

    # comment
    alphabet: a b
    states: 0 1
    initial: 0
    accepting: 1
    trans: 0 a 1
    ...

Mealy files drop ``accepting:``, may declare ``outputs:`` and add
``out: <state> <symbol> <output>`` lines.  Rewriting files hold one rule per
line, ``LHS -> RHS`` with ``_`` for the empty word; controlled rules append
``| ex = REGEX | ey = REGEX``.
"""
from __future__ import annotations

from typing import Optional, Union

from .automata import Dfa, MealyMachine
from .errors import InputError, ParseError
from .nfa import Alt, Concat, EmptySet, Epsilon, Regex, Star, Sym, any_symbol, sigma_star
from .rewriting import ControlledRule, Csrs, RewriteRule, Srs
from .words import Alphabet, Word, show

SINK = "sink"


def _lines(text: str):
    """(line number, stripped content, column offset) with comments removed."""
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0]
        stripped = line.strip()
        if stripped:
            yield no, stripped, len(line) - len(line.lstrip()) + 1


def _header(content: str):
    key, sep, rest = content.partition(":")
    if not sep:
        return None, content
    return key.strip().lower(), rest


def _column(content: str, token: str, start_col: int) -> int:
    idx = content.find(token)
    return start_col + max(idx, 0)


# -- automata ---------------------------------------------------------------------

def parse_automaton(text: str, complete_with_sink: bool = False) -> Union[Dfa, MealyMachine]:
    headers: dict = {}
    trans: list = []
    outs: list = []
    for no, content, col in _lines(text):
        key, rest = _header(content)
        if key is None:
            raise ParseError(f"expected 'key: value', got {content!r}", no, col)
        fields = rest.split()
        if key in ("alphabet", "states", "initial", "accepting", "outputs"):
            if key in headers:
                raise ParseError(f"duplicate {key!r} header", no, col)
            headers[key] = (fields, no, col)
        elif key in ("trans", "out"):
            if len(fields) != 3:
                raise ParseError(f"{key!r} needs exactly three fields", no, col)
            (trans if key == "trans" else outs).append((fields, no, col, content))
        else:
            raise ParseError(f"unknown header {key!r}", no, col)
    for required in ("alphabet", "states", "initial"):
        if required not in headers:
            raise ParseError(f"missing {required!r} header")
    mealy = bool(outs) or "outputs" in headers
    try:
        alphabet = Alphabet(tuple(headers["alphabet"][0]))
    except InputError as exc:
        raise ParseError(str(exc), *headers["alphabet"][1:]) from None
    names, no, col = headers["states"]
    if not names:
        raise ParseError("no states declared", no, col)
    ids = {}
    for n in names:
        if n in ids:
            raise ParseError(f"duplicate state {n!r}", no, col)
        ids[n] = len(ids)

    def state(name, no, col):
        if name not in ids:
            raise ParseError(f"unknown state {name!r}", no, col)
        return ids[name]

    init_fields, no, col = headers["initial"]
    if len(init_fields) != 1:
        raise ParseError("exactly one initial state expected", no, col)
    initial = state(init_fields[0], no, col)

    delta: dict = {}
    for (src, sym, dst), no, col, content in trans:
        if sym not in alphabet:
            raise ParseError(f"unknown symbol {sym!r}", no, _column(content, sym, col))
        key = (state(src, no, col), alphabet.index(sym))
        if key in delta:
            raise ParseError(f"duplicate transition for {src} {sym}", no, col)
        delta[key] = state(dst, no, _column(content, dst, col))

    n, k = len(ids), len(alphabet)
    missing = [(q, i) for q in range(n) for i in range(k) if (q, i) not in delta]
    if missing:
        if not complete_with_sink or mealy:
            q, i = missing[0]
            raise ParseError(f"missing transition for state {names[q]} on {alphabet.symbols[i]} "
                             "(pass --complete-with-sink to add a rejecting sink)")
        sink = n
        n += 1
        for q in range(n):
            for i in range(k):
                delta.setdefault((q, i), sink)
    table = tuple(tuple(delta[q, i] for i in range(k)) for q in range(n))

    if not mealy:
        acc_fields, no, col = headers.get("accepting", ([], None, None))
        accepting = frozenset(state(a, no, col) for a in acc_fields)
        return Dfa(alphabet, table, initial, accepting)

    if "accepting" in headers:
        raise ParseError("Mealy files take 'out:' lines, not 'accepting:'", *headers["accepting"][1:])
    out: dict = {}
    for (src, sym, o), no, col, content in outs:
        if sym not in alphabet:
            raise ParseError(f"unknown symbol {sym!r}", no, _column(content, sym, col))
        key = (state(src, no, col), alphabet.index(sym))
        if key in out:
            raise ParseError(f"duplicate output for {src} {sym}", no, col)
        out[key] = o
    for q in range(n):
        for i in range(k):
            if (q, i) not in out:
                raise ParseError(f"missing output for state {names[q]} on {alphabet.symbols[i]}")
    if "outputs" in headers:
        outputs = Alphabet(tuple(headers["outputs"][0]))
        for (q, i), o in out.items():
            if o not in outputs:
                raise ParseError(f"output {o!r} not declared in 'outputs:'")
    else:
        outputs = Alphabet(tuple(sorted(set(out.values()))))
    lam = tuple(tuple(out[q, i] for i in range(k)) for q in range(n))
    return MealyMachine(alphabet, outputs, table, lam, initial)


def serialize_automaton(m: Union[Dfa, MealyMachine]) -> str:
    alphabet = m.alphabet
    lines = [f"alphabet: {' '.join(alphabet)}"]
    if isinstance(m, MealyMachine):
        lines.append(f"outputs: {' '.join(m.outputs)}")
    lines.append(f"states: {' '.join(str(q) for q in range(m.n_states))}")
    lines.append(f"initial: {m.initial}")
    if isinstance(m, Dfa):
        lines.append(f"accepting: {' '.join(str(q) for q in sorted(m.accepting))}")
    for q, row in enumerate(m.delta):
        for s, t in zip(alphabet, row):
            lines.append(f"trans: {q} {s} {t}")
    if isinstance(m, MealyMachine):
        for q, row in enumerate(m.out):
            for s, o in zip(alphabet, row):
                lines.append(f"out: {q} {s} {o}")
    return "\n".join(lines) + "\n"


# -- regexes ------------------------------------------------------------------------

_OPERATORS = "()+*~!."


def _tokenize(text: str, alphabet: Alphabet, line=None, offset: int = 1) -> list:
    by_length = sorted(alphabet.symbols, key=len, reverse=True)
    tokens = []
    i = 0
    while i < len(text):
        if text[i].isspace():
            i += 1
            continue
        sym = next((s for s in by_length if text.startswith(s, i)), None)
        if sym is not None:
            tokens.append(("sym", sym, offset + i))
            i += len(sym)
        elif text[i] in _OPERATORS:
            tokens.append(("op", text[i], offset + i))
            i += 1
        else:
            raise ParseError(f"unexpected character {text[i]!r} in regex", line, offset + i)
    return tokens


class _RegexParser:
    def __init__(self, tokens, alphabet, line, end_col):
        self.tokens = tokens
        self.pos = 0
        self.alphabet = alphabet
        self.line = line
        self.end_col = end_col

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def error(self, message):
        tok = self.peek()
        raise ParseError(message, self.line, tok[2] if tok else self.end_col)

    def parse(self) -> Regex:
        if self.peek() is None:
            self.error("empty regex")
        e = self.alt()
        if self.peek() is not None:
            self.error(f"unexpected {self.peek()[1]!r}")
        return e

    def alt(self) -> Regex:
        e = self.concat()
        while self.peek() is not None and self.peek()[:2] == ("op", "+"):
            self.pos += 1
            e = Alt(e, self.concat())
        return e

    def _starts_atom(self, tok) -> bool:
        return tok is not None and (tok[0] == "sym" or tok[1] in "(~!.")

    def concat(self) -> Regex:
        if not self._starts_atom(self.peek()):
            self.error("expected a regex term")
        e = self.star()
        while self._starts_atom(self.peek()):
            e = Concat(e, self.star())
        return e

    def star(self) -> Regex:
        e = self.atom()
        while self.peek() is not None and self.peek()[:2] == ("op", "*"):
            self.pos += 1
            e = Star(e)
        return e

    def atom(self) -> Regex:
        kind, value, _ = self.peek()
        self.pos += 1
        if kind == "sym":
            return Sym(value)
        if value == "(":
            e = self.alt()
            if self.peek() is None or self.peek()[:2] != ("op", ")"):
                self.error("expected ')'")
            self.pos += 1
            return e
        if value == "~":
            return Epsilon()
        if value == "!":
            return EmptySet()
        return any_symbol(self.alphabet)


def parse_regex(text: str, alphabet: Alphabet, line=None, offset: int = 1) -> Regex:
    tokens = _tokenize(text, alphabet, line, offset)
    return _RegexParser(tokens, alphabet, line, offset + len(text)).parse()


def serialize_regex(e: Regex) -> str:
    if isinstance(e, Sym):
        return e.symbol
    if isinstance(e, Epsilon):
        return "~"
    if isinstance(e, EmptySet):
        return "!"
    if isinstance(e, Star):
        inner = serialize_regex(e.inner)
        atomic = isinstance(e.inner, (Sym, Epsilon, EmptySet, Star))
        return f"{inner}*" if atomic else f"({inner})*"
    if isinstance(e, Concat):
        left = serialize_regex(e.left)
        right = serialize_regex(e.right)
        if isinstance(e.left, Alt):
            left = f"({left})"
        if isinstance(e.right, (Alt, Concat)):
            right = f"({right})"
        return f"{left} {right}"
    if isinstance(e, Alt):
        right = serialize_regex(e.right)
        if isinstance(e.right, Alt):
            right = f"({right})"
        return f"{serialize_regex(e.left)} + {right}"
    raise InputError(f"not a regex: {e!r}")


# -- rewriting systems ----------------------------------------------------------------

def _word(text: str, alphabet: Optional[Alphabet], no, col) -> Word:
    parts = text.split()
    if parts == ["_"]:
        return ()
    if not parts:
        raise ParseError("empty side; write '_' for the empty word", no, col)
    if alphabet is not None:
        for p in parts:
            if p not in alphabet:
                raise ParseError(f"unknown symbol {p!r}", no, col + text.find(p))
    return tuple(parts)


def _rule_lines(text: str):
    """Split a rewriting file into headers and raw rule lines."""
    headers: dict = {}
    rules: list = []
    for no, content, col in _lines(text):
        if "->" not in content:
            key, rest = _header(content)
            if key in ("alphabet", "one-sided"):
                headers[key] = (rest.split(), no, col)
                continue
            raise ParseError(f"expected 'LHS -> RHS', got {content!r}", no, col)
        rules.append((no, content, col))
    return headers, rules


def _alphabet_for(headers, rules, given: Optional[Alphabet]) -> Alphabet:
    if given is not None:
        if "alphabet" in headers and set(headers["alphabet"][0]) != set(given.symbols):
            raise ParseError("alphabet header disagrees with the target alphabet",
                             *headers["alphabet"][1:])
        return given
    if "alphabet" in headers:
        fields, no, col = headers["alphabet"]
        try:
            return Alphabet(tuple(fields))
        except InputError as exc:
            raise ParseError(str(exc), no, col) from None
    seen = set()
    for _, content, _ in rules:
        sides = content.split("|", 1)[0].replace("->", " ")
        seen.update(p for p in sides.split() if p != "_")
    if not seen:
        raise ParseError("cannot infer an alphabet from an empty system")
    return Alphabet(tuple(sorted(seen)))


def _split_rule(content: str, no, col, alphabet):
    lhs_text, _, rhs_text = content.partition("->")
    return (_word(lhs_text, alphabet, no, col),
            _word(rhs_text, alphabet, no, col + len(lhs_text) + 2))


def parse_srs(text: str, alphabet: Optional[Alphabet] = None) -> Srs:
    headers, lines = _rule_lines(text)
    alphabet = _alphabet_for(headers, lines, alphabet)
    one_sided = False
    if "one-sided" in headers:
        fields, no, col = headers["one-sided"]
        if fields not in (["true"], ["false"]):
            raise ParseError("one-sided: expects true or false", no, col)
        one_sided = fields == ["true"]
    rules = []
    for no, content, col in lines:
        if "|" in content:
            raise ParseError("context constraints need a controlled system file", no,
                             col + content.index("|"))
        lhs, rhs = _split_rule(content, no, col, alphabet)
        if not lhs:
            one_sided = True
        try:
            rules.append(RewriteRule(lhs, rhs))
        except InputError as exc:
            raise ParseError(str(exc), no, col) from None
    return Srs(alphabet, tuple(rules), one_sided=one_sided)


def serialize_srs(r: Srs) -> str:
    lines = [f"alphabet: {' '.join(r.alphabet)}"]
    if r.one_sided:
        lines.append("one-sided: true")
    lines.extend(str(rule) for rule in r.rules)
    return "\n".join(lines) + "\n"


def parse_csrs(text: str, alphabet: Optional[Alphabet] = None) -> Csrs:
    headers, lines = _rule_lines(text)
    alphabet = _alphabet_for(headers, lines, alphabet)
    top = sigma_star(alphabet)
    rules = []
    for no, content, col in lines:
        parts = content.split("|")
        lhs, rhs = _split_rule(parts[0], no, col, alphabet)
        ctx = {"ex": top, "ey": top}
        offset = col + len(parts[0]) + 1
        for part in parts[1:]:
            key, eq, body = part.partition("=")
            key = key.strip()
            if not eq or key not in ctx:
                raise ParseError("expected 'ex = REGEX' or 'ey = REGEX'", no, offset)
            ctx[key] = parse_regex(body, alphabet, no, offset + len(key) + 1)
            offset += len(part) + 1
        try:
            rules.append(ControlledRule(lhs, rhs, ctx["ex"], ctx["ey"]))
        except InputError as exc:
            raise ParseError(str(exc), no, col) from None
    return Csrs(alphabet, tuple(rules))


def serialize_csrs(c: Csrs) -> str:
    lines = [f"alphabet: {' '.join(c.alphabet)}"]
    for r in c.rules:
        lines.append(f"{show(r.lhs)} -> {show(r.rhs)} | ex = {serialize_regex(r.prefix_ctx)}"
                     f" | ey = {serialize_regex(r.suffix_ctx)}")
    return "\n".join(lines) + "\n"


def parse_rewriting(text: str, alphabet: Optional[Alphabet] = None) -> Union[Srs, Csrs]:
    """Plain system unless some rule carries a ``|`` context."""
    _, lines = _rule_lines(text)
    if any("|" in content for _, content, _ in lines):
        return parse_csrs(text, alphabet)
    return parse_srs(text, alphabet)


def read_automaton(path, complete_with_sink: bool = False):
    with open(path, encoding="utf-8") as fh:
        return parse_automaton(fh.read(), complete_with_sink)


def read_rewriting(path, alphabet: Optional[Alphabet] = None):
    with open(path, encoding="utf-8") as fh:
        return parse_rewriting(fh.read(), alphabet)
