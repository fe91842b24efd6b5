"""Acceptance conditions over transition marks.

An acceptance condition is a positive Boolean formula over atoms Inf(S) and
Fin(S), where S is a set of mark indices (a bitmask).  A run satisfies Inf(S)
iff some mark in S occurs on infinitely many of its transitions, and Fin(S)
iff no mark in S does.  Atoms range over mark sets rather than single marks:
Inf(S) abbreviates the disjunction of Inf(j) for j in S, and Fin(S) the
conjunction of Fin(j) for j in S, which keeps merged Fin atoms from
multiplying marks.

Mark sets are plain ints used as bitmasks.  The constant ALL stands for the
set of all transitions of the owning automaton (Inf(ALL) holds on every run);
it appears only inside DnfAcceptance and is materialized as a real mark by
automaton-level code when needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

# Sentinel mark set meaning "every transition"; only valid inside DnfAcceptance.
ALL = -1

EQUIVALENCE_MARK_LIMIT = 24


class AcceptanceError(ValueError):
    pass


class NotInDnfError(AcceptanceError):
    pass


def mark_set(indices: Iterable[int]) -> int:
    bits = 0
    for i in indices:
        if i < 0:
            raise AcceptanceError(f"negative mark index {i}")
        bits |= 1 << i
    return bits


def mark_indices(bits: int) -> Iterator[int]:
    i = 0
    while bits:
        if bits & 1:
            yield i
        bits >>= 1
        i += 1


@dataclass(frozen=True)
class Acceptance:
    """Base class for acceptance formula nodes."""


@dataclass(frozen=True)
class BoolConst(Acceptance):
    value: bool


@dataclass(frozen=True)
class Inf(Acceptance):
    marks: int


@dataclass(frozen=True)
class Fin(Acceptance):
    marks: int


@dataclass(frozen=True)
class And(Acceptance):
    parts: tuple[Acceptance, ...]


@dataclass(frozen=True)
class Or(Acceptance):
    parts: tuple[Acceptance, ...]


TRUE = BoolConst(True)
FALSE = BoolConst(False)


def inf_(marks: int) -> Acceptance:
    """Inf over a mark set; the empty set is unsatisfiable."""
    if marks == ALL:
        raise AcceptanceError("ALL is not a concrete mark set")
    return Inf(marks) if marks else FALSE


def fin_(marks: int) -> Acceptance:
    """Fin over a mark set; the empty set is trivially satisfied."""
    if marks == ALL:
        raise AcceptanceError("ALL is not a concrete mark set")
    return Fin(marks) if marks else TRUE


def and_(parts: Iterable[Acceptance]) -> Acceptance:
    """Conjunction; flattens, simplifies constants, merges Fin atoms.

    Fin(S) & Fin(S') is the same condition as Fin(S | S'), so sibling Fin
    atoms collapse into one.  This keeps formulas canonical enough that the
    text form round-trips structurally.
    """
    flat: list[Acceptance] = []
    fin_marks = 0
    fin_pos = -1
    for p in parts:
        if isinstance(p, And):
            items: Iterable[Acceptance] = p.parts
        else:
            items = (p,)
        for q in items:
            if q == TRUE:
                continue
            if q == FALSE:
                return FALSE
            if isinstance(q, Fin):
                if fin_pos < 0:
                    fin_pos = len(flat)
                    flat.append(q)
                fin_marks |= q.marks
            else:
                flat.append(q)
    if fin_pos >= 0:
        flat[fin_pos] = Fin(fin_marks)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def or_(parts: Iterable[Acceptance]) -> Acceptance:
    """Disjunction; flattens, simplifies constants, merges Inf atoms."""
    flat: list[Acceptance] = []
    inf_marks = 0
    inf_pos = -1
    for p in parts:
        if isinstance(p, Or):
            items: Iterable[Acceptance] = p.parts
        else:
            items = (p,)
        for q in items:
            if q == FALSE:
                continue
            if q == TRUE:
                return TRUE
            if isinstance(q, Inf):
                if inf_pos < 0:
                    inf_pos = len(flat)
                    flat.append(q)
                inf_marks |= q.marks
            else:
                flat.append(q)
    if inf_pos >= 0:
        flat[inf_pos] = Inf(inf_marks)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def evaluate(seen: int, phi: Acceptance) -> bool:
    """Decide phi for a run whose infinitely recurring marks are `seen`."""
    match phi:
        case BoolConst(value=v):
            return v
        case Inf(marks=m):
            return bool(seen & m)
        case Fin(marks=m):
            return not seen & m
        case And(parts=ps):
            return all(evaluate(seen, p) for p in ps)
        case Or(parts=ps):
            return any(evaluate(seen, p) for p in ps)
    raise AcceptanceError(f"not an acceptance formula: {phi!r}")


def length(phi: Acceptance) -> int:
    """Number of atoms, counting an atom over a mark set as its expansion size."""
    match phi:
        case BoolConst():
            return 1
        case Inf(marks=m) | Fin(marks=m):
            return m.bit_count()
        case And(parts=ps) | Or(parts=ps):
            return sum(length(p) for p in ps)
    raise AcceptanceError(f"not an acceptance formula: {phi!r}")


def all_marks(phi: Acceptance) -> int:
    match phi:
        case BoolConst():
            return 0
        case Inf(marks=m) | Fin(marks=m):
            return m
        case And(parts=ps) | Or(parts=ps):
            bits = 0
            for p in ps:
                bits |= all_marks(p)
            return bits
    raise AcceptanceError(f"not an acceptance formula: {phi!r}")


def negate(phi: Acceptance) -> Acceptance:
    """Complement condition: dualize operators and swap Inf with Fin."""
    match phi:
        case BoolConst(value=v):
            return FALSE if v else TRUE
        case Inf(marks=m):
            return fin_(m)
        case Fin(marks=m):
            return inf_(m)
        case And(parts=ps):
            return or_(negate(p) for p in ps)
        case Or(parts=ps):
            return and_(negate(p) for p in ps)
    raise AcceptanceError(f"not an acceptance formula: {phi!r}")


def offset_marks(phi: Acceptance, offset: int) -> Acceptance:
    """Shift every mark index up by `offset`."""
    match phi:
        case BoolConst():
            return phi
        case Inf(marks=m):
            return Inf(m << offset)
        case Fin(marks=m):
            return Fin(m << offset)
        case And(parts=ps):
            return And(tuple(offset_marks(p, offset) for p in ps))
        case Or(parts=ps):
            return Or(tuple(offset_marks(p, offset) for p in ps))
    raise AcceptanceError(f"not an acceptance formula: {phi!r}")


def equivalent(phi: Acceptance, psi: Acceptance, n_marks: int) -> bool:
    """Exhaustive equivalence over all mark subsets; capped at 24 marks."""
    if n_marks > EQUIVALENCE_MARK_LIMIT:
        raise AcceptanceError(
            f"equivalence check limited to {EQUIVALENCE_MARK_LIMIT} marks, got {n_marks}"
        )
    return all(
        evaluate(seen, phi) == evaluate(seen, psi) for seen in range(1 << n_marks)
    )


@dataclass(frozen=True)
class DnfDisjunct:
    """One disjunct Fin(fin) & Inf(infs[0]) & ... & Inf(infs[-1]).

    infs is non-empty; a disjunct with no Inf atom gets the ALL sentinel,
    Inf over every transition, which every run satisfies.
    """

    fin: int
    infs: tuple[int, ...]


@dataclass(frozen=True)
class DnfAcceptance:
    """Disjunctive normal form; no disjuncts means the condition is false."""

    disjuncts: tuple[DnfDisjunct, ...]


def to_dnf(phi: Acceptance) -> DnfAcceptance:
    """Distribute into DNF, merging Fin atoms per disjunct.

    Duplicate Inf sets within a disjunct and duplicate disjuncts are dropped
    (first occurrence kept); no other subsumption is applied, so the output
    order is deterministic.
    """

    def walk(node: Acceptance) -> list[tuple[int, tuple[int, ...]]]:
        match node:
            case BoolConst(value=v):
                return [(0, ())] if v else []
            case Inf(marks=m):
                return [(0, (m,))]
            case Fin(marks=m):
                return [(m, ())]
            case Or(parts=ps):
                out: list[tuple[int, tuple[int, ...]]] = []
                for p in ps:
                    out.extend(walk(p))
                return out
            case And(parts=ps):
                acc = [(0, ())]
                for p in ps:
                    branch = walk(p)
                    acc = [(f1 | f2, i1 + i2) for (f1, i1) in acc for (f2, i2) in branch]
                return acc
        raise AcceptanceError(f"not an acceptance formula: {node!r}")

    disjuncts: list[DnfDisjunct] = []
    seen_disjuncts = set()
    for fin, infs in walk(phi):
        uniq: list[int] = []
        for s in infs:
            if s not in uniq:
                uniq.append(s)
        d = DnfDisjunct(fin, tuple(uniq) if uniq else (ALL,))
        if d not in seen_disjuncts:
            seen_disjuncts.add(d)
            disjuncts.append(d)
    return DnfAcceptance(tuple(disjuncts))


def evaluate_dnf(seen: int, dnf: DnfAcceptance) -> bool:
    return any(
        not seen & d.fin and all(s == ALL or seen & s for s in d.infs)
        for d in dnf.disjuncts
    )


def dnf_length(dnf: DnfAcceptance) -> int:
    """Atom count of the DNF, ALL counting as a single atom."""
    total = 0
    for d in dnf.disjuncts:
        total += d.fin.bit_count()
        total += sum(1 if s == ALL else s.bit_count() for s in d.infs)
    return total


def offset_dnf(dnf: DnfAcceptance, offset: int) -> DnfAcceptance:
    return DnfAcceptance(
        tuple(
            DnfDisjunct(
                d.fin << offset,
                tuple(s if s == ALL else s << offset for s in d.infs),
            )
            for d in dnf.disjuncts
        )
    )


def disjunct_formula(d: DnfDisjunct) -> Acceptance:
    """Formula form of a single disjunct; the ALL sentinel is not expressible."""
    if ALL in d.infs:
        raise AcceptanceError("disjunct uses ALL; materialize it as a mark first")
    return and_([fin_(d.fin), *[Inf(s) for s in d.infs]])


def dnf_formula(dnf: DnfAcceptance) -> Acceptance:
    return or_(disjunct_formula(d) for d in dnf.disjuncts)


def dnf_structure(phi: Acceptance) -> DnfAcceptance:
    """Read a syntactically DNF formula back into DnfAcceptance.

    Accepted shapes: FALSE, a single disjunct, or a disjunction of disjuncts,
    where a disjunct is a conjunction of at most one Fin atom and at least one
    Inf atom.  Anything else raises NotInDnfError.
    """
    if phi == FALSE:
        return DnfAcceptance(())
    parts = phi.parts if isinstance(phi, Or) else (phi,)
    disjuncts = []
    for part in parts:
        atoms = part.parts if isinstance(part, And) else (part,)
        fin = 0
        infs: list[int] = []
        for atom in atoms:
            if isinstance(atom, Fin):
                fin |= atom.marks
            elif isinstance(atom, Inf):
                infs.append(atom.marks)
            else:
                raise NotInDnfError(f"not in DNF: unexpected {atom!r}")
        if not infs:
            raise NotInDnfError(
                "not in DNF: disjunct without Inf atom (needs an Inf over all "
                "transitions; see transforms.ensure_dnf)"
            )
        disjuncts.append(DnfDisjunct(fin, tuple(infs)))
    return DnfAcceptance(tuple(disjuncts))


def is_finless(phi: Acceptance) -> bool:
    match phi:
        case BoolConst() | Inf():
            return True
        case Fin():
            return False
        case And(parts=ps) | Or(parts=ps):
            return all(is_finless(p) for p in ps)
    raise AcceptanceError(f"not an acceptance formula: {phi!r}")


def finless_to_gba(phi: Acceptance) -> list[int]:
    """CNF of a Fin-free condition, each clause merged into one Inf mark set.

    Returns mark sets S_1..S_K with /\\ Inf(S_j) equivalent to phi.  Clauses
    are produced by left-to-right distribution; duplicate clauses are removed,
    no other subsumption, so the output is deterministic.
    """
    if not is_finless(phi):
        raise AcceptanceError("finless_to_gba requires a Fin-free condition")

    def clauses(node: Acceptance) -> list[int]:
        match node:
            case BoolConst(value=v):
                return [] if v else [0]
            case Inf(marks=m):
                return [m]
            case And(parts=ps):
                out: list[int] = []
                for p in ps:
                    out.extend(clauses(p))
                return out
            case Or(parts=ps):
                acc = [0]
                for p in ps:
                    branch = clauses(p)
                    acc = [c1 | c2 for c1 in acc for c2 in branch]
                return acc
        raise AcceptanceError(f"not an acceptance formula: {node!r}")

    out: list[int] = []
    seen = set()
    for c in clauses(phi):
        if c not in seen:
            seen.add(c)
            out.append(c)
    return out


def gba_marksets(phi: Acceptance) -> list[int] | None:
    """Mark sets of a generalized-Buchi condition /\\ Inf(S_j), else None."""
    if phi == TRUE:
        return []
    if isinstance(phi, Inf):
        return [phi.marks]
    if isinstance(phi, And) and all(isinstance(p, Inf) for p in phi.parts):
        return [p.marks for p in phi.parts]  # type: ignore[union-attr]
    return None


def format_acceptance(phi: Acceptance) -> str:
    """Canonical HOA Acceptance formula text.

    Mark-set atoms expand to their single-mark form: Inf(S) as a disjunction,
    Fin(S) as a conjunction.  Parsing merges these back, so the round trip is
    structural.
    """

    def fmt(node: Acceptance, ctx: int) -> str:
        match node:
            case BoolConst(value=v):
                return "t" if v else "f"
            case Inf(marks=m):
                txt = " | ".join(f"Inf({j})" for j in mark_indices(m))
                return f"({txt})" if m.bit_count() > 1 and ctx > 1 else txt
            case Fin(marks=m):
                txt = " & ".join(f"Fin({j})" for j in mark_indices(m))
                return f"({txt})" if m.bit_count() > 1 and ctx > 2 else txt
            case And(parts=ps):
                return " & ".join(fmt(p, 2) for p in ps)
            case Or(parts=ps):
                txt = " | ".join(fmt(p, 1) for p in ps)
                return f"({txt})" if ctx > 1 else txt
        raise AcceptanceError(f"not an acceptance formula: {node!r}")

    return fmt(phi, 1)


def parse_acceptance(text: str, n_marks: int | None = None) -> Acceptance:
    """Parse the HOA Acceptance formula syntax (t, f, Inf(k), Fin(k), &, |)."""
    tokens = _tokenize_acceptance(text)
    pos = 0

    def peek() -> str | None:
        return tokens[pos][0] if pos < len(tokens) else None

    def take() -> tuple[str, int]:
        nonlocal pos
        if pos >= len(tokens):
            raise AcceptanceError(f"unexpected end of acceptance formula: {text!r}")
        tok = tokens[pos]
        pos += 1
        return tok

    def parse_or() -> Acceptance:
        parts = [parse_and()]
        while peek() == "|":
            take()
            parts.append(parse_and())
        return or_(parts)

    def parse_and() -> Acceptance:
        parts = [parse_atom()]
        while peek() == "&":
            take()
            parts.append(parse_atom())
        return and_(parts)

    def parse_atom() -> Acceptance:
        kind, col = take()
        if kind == "t":
            return TRUE
        if kind == "f":
            return FALSE
        if kind == "(":
            inner = parse_or()
            kind, col = take()
            if kind != ")":
                raise AcceptanceError(f"expected ')' at column {col} in {text!r}")
            return inner
        if kind in ("Inf", "Fin"):
            open_, col2 = take()
            if open_ != "(":
                raise AcceptanceError(f"expected '(' at column {col2} in {text!r}")
            num, col3 = take()
            if not num.isdigit():
                raise AcceptanceError(
                    f"expected mark index at column {col3} in {text!r}"
                    " (negated mark atoms are unsupported)"
                )
            close, col4 = take()
            if close != ")":
                raise AcceptanceError(f"expected ')' at column {col4} in {text!r}")
            mark = int(num)
            if n_marks is not None and mark >= n_marks:
                raise AcceptanceError(
                    f"mark {mark} out of range, acceptance declares {n_marks}"
                )
            return Inf(1 << mark) if kind == "Inf" else Fin(1 << mark)
        raise AcceptanceError(f"unexpected token {kind!r} at column {col} in {text!r}")

    result = parse_or()
    if pos != len(tokens):
        raise AcceptanceError(
            f"trailing input at column {tokens[pos][1]} in {text!r}"
        )
    return result


def _tokenize_acceptance(text: str) -> list[tuple[str, int]]:
    tokens: list[tuple[str, int]] = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
        elif c in "()&|":
            tokens.append((c, i))
            i += 1
        elif text.startswith("Inf", i):
            tokens.append(("Inf", i))
            i += 3
        elif text.startswith("Fin", i):
            tokens.append(("Fin", i))
            i += 3
        elif c in "tf" and not text[i + 1 : i + 2].isalnum():
            tokens.append((c, i))
            i += 1
        elif c.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append((text[i:j], i))
            i = j
        else:
            raise AcceptanceError(f"bad character {c!r} at column {i} in {text!r}")
    return tokens
