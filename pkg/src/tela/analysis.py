"""Language analysis: emptiness, membership, and an independent oracle.

Emptiness works on the DNF of the acceptance condition.  For each disjunct
the Fin-marked transitions are deleted and the remaining reachable graph is
searched for a strongly connected set of transitions meeting every Inf set.
The same search core optionally takes a second DNF that the witness must
*violate*, which is what deterministic containment needs: there the witness
set is refined by deleting one Inf set of a satisfied negative disjunct and
recursing into the sub-SCCs (the standard Streett-style restriction).
"""

from __future__ import annotations

import random
from functools import lru_cache

from .acceptance import (
    ALL,
    Acceptance,
    And,
    BoolConst,
    DnfAcceptance,
    Fin,
    Inf,
    Or,
    to_dnf,
)
from .core import Lasso, Tela, TelaError, Transition, tarjan_scc

ORACLE_STATE_LIMIT = 7
ORACLE_MARK_LIMIT = 16

_dnf_of = lru_cache(maxsize=None)(to_dnf)


class OracleLimitError(TelaError):
    pass


def is_empty(a: Tela) -> bool:
    return accepting_lasso(a) is None


def accepting_lasso(a: Tela) -> Lasso | None:
    """An accepting lasso of `a`, or None when the language is empty.

    The cycle visits one representative transition per Inf set of the
    witnessing DNF disjunct, connected by shortest paths inside the witness
    SCC; the prefix is a shortest path from an initial state.
    """
    dnf = _dnf_of(a.acceptance)
    hit = dnf_witness(a.transitions, a.initial, dnf)
    if hit is None:
        return None
    di, scc_ts = hit
    disjunct = dnf.disjuncts[di]
    anchor = min(t[0] for t in scc_ts)
    prefix = _shortest_path(a.transitions, set(a.initial), anchor)
    ordered = sorted(scc_ts)
    cycle: list[Transition] = []
    cur = anchor
    for s in disjunct.infs:
        if s == ALL:
            continue
        rep = next(t for t in ordered if t[3] & s)
        cycle.extend(_shortest_path(scc_ts, {cur}, rep[0]))
        cycle.append(rep)
        cur = rep[2]
    if not cycle:
        first = next(t for t in ordered if t[0] == anchor)
        cycle.append(first)
        cur = first[2]
    cycle.extend(_shortest_path(scc_ts, {cur}, anchor))
    return Lasso(tuple(prefix), tuple(cycle))


def accepts(a: Tela, u: tuple[int, ...], v: tuple[int, ...]) -> bool:
    """Membership of the lasso word u v^omega."""
    if not v:
        raise TelaError("lasso word needs a non-empty cycle part")
    for letter in (*u, *v):
        if not 0 <= letter < a.n_letters:
            raise TelaError(f"letter {letter} outside the alphabet")
    word = u + v
    n_pos = len(word)
    by_letter: dict[int, list[Transition]] = {}
    for t in a.transitions:
        by_letter.setdefault(t[1], []).append(t)
    trans: list[Transition] = []
    for i, letter in enumerate(word):
        nxt = i + 1 if i + 1 < n_pos else len(u)
        for q, _, d, m in by_letter.get(letter, ()):
            trans.append((q * n_pos + i, letter, d * n_pos + nxt, m))
    initial = {q * n_pos for q in a.initial}
    return dnf_witness(tuple(trans), initial, _dnf_of(a.acceptance)) is not None


def sample_lassos(
    a: Tela, n: int, seed: int
) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Seeded random lasso words over the alphabet of `a`."""
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        u = tuple(rng.randrange(a.n_letters) for _ in range(rng.randint(0, 6)))
        v = tuple(rng.randrange(a.n_letters) for _ in range(rng.randint(1, 6)))
        out.append((u, v))
    return out


def brute_force_empty(a: Tela) -> bool:
    """Emptiness oracle by exhaustive enumeration, independent of is_empty.

    The language is non-empty iff some reachable, mutually connected set of
    transitions has a mark union satisfying the acceptance condition.  All
    2^n_marks candidate mark unions are tried; connectivity uses a naive
    transitive closure and satisfaction a local evaluator, sharing nothing
    with the DNF-based path.
    """
    if a.n_states > ORACLE_STATE_LIMIT:
        raise OracleLimitError(
            f"oracle limited to {ORACLE_STATE_LIMIT} states, got {a.n_states}"
        )
    if a.n_marks > ORACLE_MARK_LIMIT:
        raise OracleLimitError(
            f"oracle limited to {ORACLE_MARK_LIMIT} marks, got {a.n_marks}"
        )
    reach = set(a.initial)
    while True:
        grown = {d for (s, _, d, _) in a.transitions if s in reach} - reach
        if not grown:
            break
        reach |= grown
    for want in range(1 << a.n_marks):
        if not _models(want, a.acceptance):
            continue
        sub = [
            t
            for t in a.transitions
            if t[0] in reach and not (t[3] & ~want)
        ]
        closure = {q: {q} for q in range(a.n_states)}
        for s, _, d, _ in sub:
            closure[s].add(d)
        changed = True
        while changed:
            changed = False
            for q in closure:
                extra = set()
                for r in closure[q]:
                    extra |= closure[r]
                if not extra <= closure[q]:
                    closure[q] |= extra
                    changed = True
        for q in range(a.n_states):
            members = {r for r in closure[q] if q in closure[r]}
            internal = [t for t in sub if t[0] in members and t[2] in members]
            if not internal:
                continue
            got = 0
            for t in internal:
                got |= t[3]
            if got == want:
                return False
    return True


def _models(seen: int, phi: Acceptance) -> bool:
    if isinstance(phi, BoolConst):
        return phi.value
    if isinstance(phi, Inf):
        return (seen & phi.marks) != 0
    if isinstance(phi, Fin):
        return (seen & phi.marks) == 0
    if isinstance(phi, And):
        return all(_models(seen, p) for p in phi.parts)
    if isinstance(phi, Or):
        return any(_models(seen, p) for p in phi.parts)
    raise TelaError(f"not an acceptance formula: {phi!r}")


def dnf_witness(
    transitions: tuple[Transition, ...],
    initial: frozenset[int] | set[int],
    pos: DnfAcceptance,
    neg: DnfAcceptance = DnfAcceptance(()),
) -> tuple[int, tuple[Transition, ...]] | None:
    """Search for a reachable strongly connected transition set whose marks
    satisfy some disjunct of `pos` and no disjunct of `neg`.

    Returns (pos disjunct index, transitions of the witness set) or None.
    """
    reach = _forward_reachable(transitions, initial)
    for di, d in enumerate(pos.disjuncts):
        base = tuple(
            t for t in transitions if t[0] in reach and not (t[3] & d.fin)
        )
        for _, internal in _scc_transitions(base):
            found = _refine(internal, d.infs, neg)
            if found is not None:
                return di, found
    return None


def _refine(
    ts: tuple[Transition, ...],
    infs: tuple[int, ...],
    neg: DnfAcceptance,
) -> tuple[Transition, ...] | None:
    marks = 0
    for t in ts:
        marks |= t[3]
    satisfied = None
    for nd in neg.disjuncts:
        if not (marks & nd.fin) and all(s == ALL or marks & s for s in nd.infs):
            satisfied = nd
            break
    if satisfied is None:
        if all(s == ALL or marks & s for s in infs):
            return ts
        return None
    for s in satisfied.infs:
        if s == ALL:
            continue
        sub = tuple(t for t in ts if not (t[3] & s))
        for _, internal in _scc_transitions(sub):
            found = _refine(internal, infs, neg)
            if found is not None:
                return found
    return None


def _scc_transitions(
    transitions: tuple[Transition, ...],
) -> list[tuple[frozenset[int], tuple[Transition, ...]]]:
    """Strongly connected components of the graph induced by the transitions,
    with their internal transitions; components without transitions dropped."""
    nodes: list[int] = []
    seen = set()
    adj: dict[int, list[int]] = {}
    for s, _, d, _ in transitions:
        for q in (s, d):
            if q not in seen:
                seen.add(q)
                nodes.append(q)
                adj[q] = []
        adj[s].append(d)
    out = []
    for comp in tarjan_scc(nodes, adj):
        internal = tuple(t for t in transitions if t[0] in comp and t[2] in comp)
        if internal:
            out.append((comp, internal))
    out.sort(key=lambda item: min(item[0]))
    return out


def _forward_reachable(
    transitions: tuple[Transition, ...], initial: frozenset[int] | set[int]
) -> set[int]:
    succ: dict[int, list[int]] = {}
    for s, _, d, _ in transitions:
        succ.setdefault(s, []).append(d)
    reach = set(initial)
    frontier = list(initial)
    while frontier:
        nxt = []
        for q in frontier:
            for d in succ.get(q, ()):
                if d not in reach:
                    reach.add(d)
                    nxt.append(d)
        frontier = nxt
    return reach


def _shortest_path(
    transitions: tuple[Transition, ...] | list[Transition],
    sources: set[int],
    goal: int,
) -> list[Transition]:
    """Shortest transition path from any source to the goal state (BFS,
    deterministic tie-break by transition order)."""
    if goal in sources:
        return []
    by_src: dict[int, list[Transition]] = {}
    for t in sorted(transitions):
        by_src.setdefault(t[0], []).append(t)
    parent: dict[int, Transition] = {}
    frontier = sorted(sources)
    seen = set(sources)
    while frontier:
        nxt = []
        for q in frontier:
            for t in by_src.get(q, ()):
                d = t[2]
                if d in seen:
                    continue
                seen.add(d)
                parent[d] = t
                if d == goal:
                    path = [t]
                    while path[0][0] not in sources:
                        path.insert(0, parent[path[0][0]])
                    return path
                nxt.append(d)
        frontier = nxt
    raise TelaError(f"no path to state {goal}")
