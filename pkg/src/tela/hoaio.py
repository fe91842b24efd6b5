"""HOA v1 input and output for the supported automaton subset.

Supported: explicit transition labels over at most 8 atomic propositions,
transition-based acceptance marks, multiple initial states (one per Start
line).  State-based acceptance, label aliases, implicit labels and initial
state conjunctions are rejected with a diagnostic carrying the line number.

Printing is canonical and byte-deterministic: fixed header order, states
ascending, one transition line per letter sorted by (letter, target, marks).
Parsing the printed form reproduces the automaton structurally.
"""

from __future__ import annotations

import re

from .acceptance import AcceptanceError, format_acceptance, parse_acceptance
from .core import MAX_AP, Tela, TelaError, Transition, is_deterministic


class HoaParseError(TelaError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


_QUOTED = re.compile(r'"([^"]*)"')


def parse_hoa(text: str) -> Tela:
    lines = text.splitlines()
    pos = 0

    version = None
    n_states = None
    initial: set[int] = set()
    ap: tuple[str, ...] | None = None
    n_marks = None
    acceptance = None

    while pos < len(lines):
        lineno = pos + 1
        line = lines[pos].strip()
        pos += 1
        if not line:
            continue
        if line == "--BODY--":
            break
        if ":" not in line:
            raise HoaParseError(f"expected a header, got {line!r}", lineno)
        key, _, rest = line.partition(":")
        rest = rest.strip()
        if key == "HOA":
            if version is not None:
                raise HoaParseError("duplicate HOA header", lineno)
            if rest != "v1":
                raise HoaParseError(f"unsupported HOA version {rest!r}", lineno)
            version = rest
        elif key == "States":
            if n_states is not None:
                raise HoaParseError("duplicate States header", lineno)
            n_states = _parse_int(rest, "state count", lineno)
        elif key == "Start":
            if not rest.isdigit():
                raise HoaParseError(
                    "only a single state per Start line is supported", lineno
                )
            initial.add(int(rest))
        elif key == "AP":
            if ap is not None:
                raise HoaParseError("duplicate AP header", lineno)
            parts = rest.split(None, 1)
            count = _parse_int(parts[0] if parts else "", "AP count", lineno)
            names = _QUOTED.findall(parts[1] if len(parts) > 1 else "")
            if len(names) != count:
                raise HoaParseError(
                    f"AP header declares {count} names but lists {len(names)}", lineno
                )
            if count > MAX_AP:
                raise HoaParseError(f"at most {MAX_AP} atomic propositions", lineno)
            ap = tuple(names)
        elif key == "Acceptance":
            if acceptance is not None:
                raise HoaParseError("duplicate Acceptance header", lineno)
            parts = rest.split(None, 1)
            n_marks = _parse_int(parts[0] if parts else "", "mark count", lineno)
            try:
                acceptance = parse_acceptance(
                    parts[1] if len(parts) > 1 else "", n_marks
                )
            except AcceptanceError as exc:
                raise HoaParseError(str(exc), lineno) from exc
        elif key in ("name", "tool", "properties", "acc-name"):
            continue
        else:
            raise HoaParseError(f"unknown header {key!r}", lineno)
    else:
        raise HoaParseError("missing --BODY--", len(lines))

    if version is None:
        raise HoaParseError("missing HOA: v1 header", 1)
    if n_states is None:
        raise HoaParseError("missing States header", 1)
    if ap is None:
        ap = ()
    if acceptance is None or n_marks is None:
        raise HoaParseError("missing Acceptance header", 1)

    n_letters = 1 << len(ap)
    transitions: list[Transition] = []
    declared: set[int] = set()
    current: int | None = None
    ended = False

    while pos < len(lines):
        lineno = pos + 1
        line = lines[pos].strip()
        pos += 1
        if not line:
            continue
        if line == "--END--":
            ended = True
            break
        if line.startswith("State:"):
            rest = line[len("State:") :].strip()
            if "{" in rest:
                raise HoaParseError(
                    "state-based acceptance marks are not supported", lineno
                )
            if rest.startswith("["):
                raise HoaParseError("state labels are not supported", lineno)
            parts = rest.split(None, 1)
            if not parts or not parts[0].isdigit():
                raise HoaParseError(f"bad State line {line!r}", lineno)
            if len(parts) > 1 and not _QUOTED.fullmatch(parts[1].strip()):
                raise HoaParseError(f"bad State line {line!r}", lineno)
            current = int(parts[0])
            if current >= n_states:
                raise HoaParseError(f"state {current} out of range", lineno)
            if current in declared:
                raise HoaParseError(f"state {current} declared twice", lineno)
            declared.add(current)
            continue
        if current is None:
            raise HoaParseError("transition before any State line", lineno)
        if not line.startswith("["):
            raise HoaParseError(
                "implicit transition labels are not supported", lineno
            )
        close = line.find("]")
        if close < 0:
            raise HoaParseError("unterminated label", lineno)
        label = line[1:close]
        rest = line[close + 1 :].strip()
        marks = 0
        if "{" in rest:
            body, _, mark_txt = rest.partition("{")
            rest = body.strip()
            mark_txt = mark_txt.strip()
            if not mark_txt.endswith("}"):
                raise HoaParseError("unterminated mark set", lineno)
            for tok in mark_txt[:-1].split():
                m = _parse_int(tok, "mark", lineno)
                if m >= n_marks:
                    raise HoaParseError(
                        f"mark {m} out of range, acceptance declares {n_marks}", lineno
                    )
                marks |= 1 << m
        if not rest.isdigit():
            raise HoaParseError(
                "expected a single target state after the label", lineno
            )
        dst = int(rest)
        if dst >= n_states:
            raise HoaParseError(f"state {dst} out of range", lineno)
        for letter in _label_letters(label, len(ap), lineno):
            transitions.append((current, letter, dst, marks))
    if not ended:
        raise HoaParseError("missing --END--", len(lines))
    for q in initial:
        if q >= n_states:
            raise HoaParseError(f"initial state {q} out of range", 1)

    try:
        return Tela(
            ap=ap,
            n_states=n_states,
            initial=frozenset(initial),
            transitions=tuple(dict.fromkeys(transitions)),
            acceptance=acceptance,
            n_marks=n_marks,
        )
    except TelaError as exc:
        raise HoaParseError(str(exc), len(lines)) from exc


def print_hoa(a: Tela) -> str:
    out = ["HOA: v1", f"States: {a.n_states}"]
    for q in sorted(a.initial):
        out.append(f"Start: {q}")
    names = " ".join(f'"{name}"' for name in a.ap)
    out.append(f"AP: {len(a.ap)}" + (f" {names}" if names else ""))
    out.append(f"Acceptance: {a.n_marks} {format_acceptance(a.acceptance)}")
    if is_deterministic(a):
        out.append("properties: deterministic")
    out.append("--BODY--")
    by_src: dict[int, list[Transition]] = {q: [] for q in range(a.n_states)}
    for t in a.transitions:
        by_src[t[0]].append(t)
    for q in range(a.n_states):
        out.append(f"State: {q}")
        for _, letter, dst, marks in sorted(
            by_src[q], key=lambda t: (t[1], t[2], t[3])
        ):
            label = _letter_label(letter, len(a.ap))
            mark_txt = ""
            if marks:
                indices = " ".join(str(i) for i in _bits(marks))
                mark_txt = f" {{{indices}}}"
            out.append(f"[{label}] {dst}{mark_txt}")
    out.append("--END--")
    return "\n".join(out) + "\n"


def _letter_label(letter: int, n_ap: int) -> str:
    if n_ap == 0:
        return "t"
    return "&".join(
        str(i) if letter >> i & 1 else f"!{i}" for i in range(n_ap)
    )


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _parse_int(token: str, what: str, lineno: int) -> int:
    if not token.isdigit():
        raise HoaParseError(f"bad {what} {token!r}", lineno)
    return int(token)


def _label_letters(label: str, n_ap: int, lineno: int) -> list[int]:
    """Letters (assignments) satisfying a HOA label formula over AP indices."""
    tokens = _tokenize_label(label, lineno)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take():
        nonlocal pos
        if pos >= len(tokens):
            raise HoaParseError(f"label {label!r} ends unexpectedly", lineno)
        tok = tokens[pos]
        pos += 1
        return tok

    def parse_or():
        node = parse_and()
        while peek() == "|":
            take()
            node = ("or", node, parse_and())
        return node

    def parse_and():
        node = parse_not()
        while peek() == "&":
            take()
            node = ("and", node, parse_not())
        return node

    def parse_not():
        if peek() == "!":
            take()
            return ("not", parse_not())
        return parse_atom()

    def parse_atom():
        tok = take()
        if tok == "(":
            node = parse_or()
            if take() != ")":
                raise HoaParseError(f"expected ')' in label {label!r}", lineno)
            return node
        if tok == "t":
            return ("const", True)
        if tok == "f":
            return ("const", False)
        if tok.isdigit():
            idx = int(tok)
            if idx >= n_ap:
                raise HoaParseError(
                    f"label {label!r} references AP {idx}, only {n_ap} declared",
                    lineno,
                )
            return ("ap", idx)
        raise HoaParseError(f"bad token {tok!r} in label {label!r}", lineno)

    tree = parse_or()
    if pos != len(tokens):
        raise HoaParseError(f"trailing input in label {label!r}", lineno)

    def holds(node, letter: int) -> bool:
        kind = node[0]
        if kind == "const":
            return node[1]
        if kind == "ap":
            return bool(letter >> node[1] & 1)
        if kind == "not":
            return not holds(node[1], letter)
        if kind == "and":
            return holds(node[1], letter) and holds(node[2], letter)
        return holds(node[1], letter) or holds(node[2], letter)

    return [letter for letter in range(1 << n_ap) if holds(tree, letter)]


def _tokenize_label(label: str, lineno: int) -> list[str]:
    tokens: list[str] = []
    i = 0
    while i < len(label):
        c = label[i]
        if c.isspace():
            i += 1
        elif c in "()&|!":
            tokens.append(c)
            i += 1
        elif c in "tf" and not label[i + 1 : i + 2].isalnum():
            tokens.append(c)
            i += 1
        elif c.isdigit():
            j = i
            while j < len(label) and label[j].isdigit():
                j += 1
            tokens.append(label[i:j])
            i = j
        else:
            raise HoaParseError(f"bad character {c!r} in label {label!r}", lineno)
    if not tokens:
        raise HoaParseError("empty label", lineno)
    return tokens
