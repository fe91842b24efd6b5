"""Acceptance transformations: Fin-removal and TELA-to-GBA translations.

Fin-removal builds the main copy plus one copy per DNF disjunct.  Copy i
drops the transitions of the disjunct's Fin set, keeps bridge transitions
from the main copy into copy i for every original transition, and the
rewritten condition asks that some copy i sees all of its Inf sets
infinitely often.  Runs that stay in the main copy see no marks and cannot
accept; accepting runs commit to one copy.

Four translations to generalized-Buchi acceptance:

- cnf: Fin-removal, then CNF of the resulting Fin-free condition with each
  clause's Inf atoms merged; up to 2^|acc| acceptance sets.
- remfin_split: disjoint GBA sum over the split of the Fin-removal output.
- split_remfin: split first, Fin-removal per disjunct, then the GBA sum.
- remfin_rewrite: single Fin-removal structure whose copies share k = max k_i
  acceptance sets, padding shorter disjuncts with Inf over all their copy's
  transitions.

The copy-based methods use at most |acc| acceptance sets.
"""

from __future__ import annotations

from functools import reduce

from .acceptance import (
    ALL,
    FALSE,
    DnfAcceptance,
    DnfDisjunct,
    Inf,
    and_,
    dnf_formula,
    dnf_structure,
    finless_to_gba,
    or_,
    to_dnf,
)
from .core import (
    Tela,
    TelaError,
    Transition,
    complete,
    split,
    sum_gba,
    with_all_mark,
)

GBA_METHODS = ("cnf", "remfin_split", "split_remfin", "remfin_rewrite")


def ensure_dnf(a: Tela) -> Tela:
    """Rewrite the acceptance condition into syntactic DNF.

    A disjunct without Inf atoms needs Inf over all transitions; in that case
    a fresh mark carried by every transition is added first.
    """
    dnf = to_dnf(a.acceptance)
    if any(ALL in d.infs for d in dnf.disjuncts):
        a, mark = with_all_mark(a)
        bit = 1 << mark
        dnf = DnfAcceptance(
            tuple(
                DnfDisjunct(d.fin, tuple(bit if s == ALL else s for s in d.infs))
                for d in dnf.disjuncts
            )
        )
    return a.with_acceptance(dnf_formula(dnf), a.n_marks)


def remove_fin(a: Tela, prune: bool = True) -> Tela:
    """Remove Fin atoms from a DNF-acceptance automaton, language-preserving.

    The output condition is the disjunction over copies i of the conjunction
    of Inf over that copy's surviving Inf-set transitions, using sum(k_i)
    fresh marks numbered copy-major.  Before pruning the output has
    (m+1)*|Q| states.
    """
    dnf = dnf_structure(a.acceptance)
    offsets = []
    total = 0
    for d in dnf.disjuncts:
        offsets.append(total)
        total += len(d.infs)

    def copy_marks(i: int, orig_marks: int) -> int:
        d = dnf.disjuncts[i]
        bits = 0
        for j, s in enumerate(d.infs):
            if orig_marks & s:
                bits |= 1 << (offsets[i] + j)
        return bits

    acceptance = or_(
        and_(
            Inf(1 << (offsets[i] + j))
            for j in range(len(d.infs))
        )
        for i, d in enumerate(dnf.disjuncts)
    )
    return _fin_removal_structure(a, dnf, copy_marks, acceptance, total, prune)


def remove_fin_gba(a: Tela, prune: bool = True) -> Tela:
    """Fin-removal variant whose output is generalized-Buchi directly.

    All copies share k = max k_i acceptance sets; set j on copy i collects
    the copy's j-th Inf set, or all of the copy's transitions when j exceeds
    k_i (the padding keeps shorter disjuncts satisfiable exactly when their
    own sets recur).
    """
    dnf = dnf_structure(a.acceptance)
    k = max((len(d.infs) for d in dnf.disjuncts), default=0)

    def copy_marks(i: int, orig_marks: int) -> int:
        d = dnf.disjuncts[i]
        bits = 0
        for j in range(k):
            if j >= len(d.infs) or orig_marks & d.infs[j]:
                bits |= 1 << j
        return bits

    acceptance = and_(Inf(1 << j) for j in range(k)) if k else FALSE
    return _fin_removal_structure(a, dnf, copy_marks, acceptance, k, prune)


def _fin_removal_structure(
    a: Tela,
    dnf: DnfAcceptance,
    copy_marks,
    acceptance,
    n_marks: int,
    prune: bool,
) -> Tela:
    n = a.n_states
    m = len(dnf.disjuncts)
    transitions: list[Transition] = []
    for s, letter, d, _marks in a.transitions:
        transitions.append((s, letter, d, 0))
    for i, disjunct in enumerate(dnf.disjuncts):
        base = (i + 1) * n
        for s, letter, d, marks in a.transitions:
            transitions.append((s, letter, base + d, 0))
            if not marks & disjunct.fin:
                transitions.append((base + s, letter, base + d, copy_marks(i, marks)))
    out = Tela(
        ap=a.ap,
        n_states=(m + 1) * n,
        initial=a.initial,
        transitions=tuple(transitions),
        acceptance=acceptance,
        n_marks=n_marks,
    )
    if prune:
        out = _prune_fin_removal(out, a, dnf)
    return out


def _prune_fin_removal(g: Tela, a: Tela, dnf: DnfAcceptance) -> Tela:
    """Drop copy states that cannot see all of their disjunct's Inf sets, then
    restrict to the reachable part and renumber in ascending state order."""
    n = a.n_states
    keep = set(range(n))
    for i, disjunct in enumerate(dnf.disjuncts):
        base = (i + 1) * n
        copy_edges = [
            (s, d)
            for s, _, d, marks in a.transitions
            if not marks & disjunct.fin
        ]
        rev: dict[int, list[int]] = {}
        for s, d in copy_edges:
            rev.setdefault(d, []).append(s)
        useful = None
        for s_marks in disjunct.infs:
            sources = {
                s
                for s, _, _, marks in a.transitions
                if not marks & disjunct.fin and marks & s_marks
            }
            good = set(sources)
            frontier = list(sources)
            while frontier:
                q = frontier.pop()
                for p in rev.get(q, ()):
                    if p not in good:
                        good.add(p)
                        frontier.append(p)
            useful = good if useful is None else useful & good
        for q in useful or ():
            keep.add(base + q)
    transitions = [
        t for t in g.transitions if t[0] in keep and t[2] in keep
    ]
    reach = set(g.initial)
    by_src: dict[int, list[Transition]] = {}
    for t in transitions:
        by_src.setdefault(t[0], []).append(t)
    frontier = list(g.initial)
    while frontier:
        q = frontier.pop()
        for t in by_src.get(q, ()):
            if t[2] not in reach:
                reach.add(t[2])
                frontier.append(t[2])
    order = sorted(reach)
    renum = {q: i for i, q in enumerate(order)}
    return Tela(
        ap=g.ap,
        n_states=len(order),
        initial=frozenset(renum[q] for q in g.initial if q in reach),
        transitions=tuple(
            (renum[s], letter, renum[d], marks)
            for (s, letter, d, marks) in transitions
            if s in reach and d in reach
        ),
        acceptance=g.acceptance,
        n_marks=g.n_marks,
    )


def to_gba(a: Tela, method: str) -> Tela:
    """Translate any TELA to a language-equal generalized-Buchi TELA."""
    if method not in GBA_METHODS:
        raise TelaError(f"unknown GBA method {method!r}; choose from {GBA_METHODS}")
    a = ensure_dnf(a)
    if a.acceptance == FALSE:
        return _empty_gba(a.ap)
    if method == "cnf":
        g = remove_fin(a)
        clause_sets = finless_to_gba(g.acceptance)
        transitions = []
        for s, letter, d, marks in g.transitions:
            bits = 0
            for j, clause in enumerate(clause_sets):
                if marks & clause:
                    bits |= 1 << j
            transitions.append((s, letter, d, bits))
        return Tela(
            ap=g.ap,
            n_states=g.n_states,
            initial=g.initial,
            transitions=tuple(transitions),
            acceptance=and_(Inf(1 << j) for j in range(len(clause_sets))),
            n_marks=len(clause_sets),
        )
    if method == "remfin_rewrite":
        return remove_fin_gba(a)
    if method == "remfin_split":
        parts = split(complete(remove_fin(a)))
    else:  # split_remfin
        parts = [complete(remove_fin(part)) for part in split(a)]
    return reduce(sum_gba, parts)


def _empty_gba(ap: tuple[str, ...]) -> Tela:
    return Tela(
        ap=ap,
        n_states=1,
        initial=frozenset({0}),
        transitions=tuple((0, letter, 0, 0) for letter in range(1 << len(ap))),
        acceptance=Inf(1),
        n_marks=1,
    )
