"""Limit-deterministic automata: checks and constructions.

An automaton is limit-deterministic when its states split into a
nondeterministic part Q_N and a deterministic part Q_D, closed under
successors, such that accepting runs eventually behave deterministically.
The canonical partition puts into Q_N exactly the states from which some
nondeterministic choice is still reachable; it is the coarsest valid split.

Three constructions produce limit-deterministic automata from a TELA with
DNF acceptance:

- limit_det_sum: determinize each disjunct separately and take the disjoint
  sum; nondeterminism is confined to the initial choice.
- build_ld: keep the original automaton as an unmarked nondeterministic
  part and jump, at any transition, into a deterministic breakpoint
  component for one disjunct.
- build_gfm: replace the nondeterministic part by the subset automaton and
  jump from a subset P into a breakpoint component seeded with any nonempty
  subset of P's successors.  The output is good for MDPs: resolving its
  nondeterminism cannot lower the probability mass of accepted runs.

Breakpoint components track (R, B, l): R the tracked run set over
Fin-deleted transitions, l a level cycling through the disjunct's Inf sets,
and B the runs that visited the level's set since the last breakpoint.
Level 0 breaks immediately; level l waits until B covers R.  The single
output mark sits on break transitions.
"""

from __future__ import annotations

from functools import reduce

from .acceptance import ALL, Inf, and_, disjunct_formula, dnf_structure
from .analysis import accepting_lasso
from .core import Lasso, Tela, TelaError, Transition, sum_automata
from .determinize import degeneralize, empty_language_automaton, safra_determinize
from .transforms import ensure_dnf, remove_fin

GFM_STATE_LIMIT = 12


def canonical_partition(a: Tela) -> tuple[frozenset[int], frozenset[int]]:
    """Split states into (Q_N, Q_D): Q_N holds the states from which a
    nondeterministic choice is reachable, Q_D all others."""
    nondet = {
        q
        for q in range(a.n_states)
        if any(len(a.succ(q, letter)) > 1 for letter in range(a.n_letters))
    }
    rev: dict[int, list[int]] = {}
    for s, _, d, _ in a.transitions:
        rev.setdefault(d, []).append(s)
    q_n = set(nondet)
    frontier = list(nondet)
    while frontier:
        q = frontier.pop()
        for p in rev.get(q, ()):
            if p not in q_n:
                q_n.add(p)
                frontier.append(p)
    q_d = frozenset(range(a.n_states)) - q_n
    return frozenset(q_n), q_d


def limit_det_violation(a: Tela) -> Lasso | None:
    """An accepting lasso that stays inside the nondeterministic part, or
    None when the automaton is limit-deterministic.

    Every run either stays in Q_N forever or moves to Q_D for good, so the
    automaton is limit-deterministic exactly when no accepting run remains
    in Q_N.  The check restricts the automaton to Q_N, sends exits to a
    trap, and demands the original condition plus infinitely many Q_N-
    internal transitions.
    """
    q_n, _ = canonical_partition(a)
    n_initial = sorted(a.initial & q_n)
    if not n_initial:
        return None
    order = sorted(q_n)
    renum = {q: i for i, q in enumerate(order)}
    trap = len(order)
    allbit = 1 << a.n_marks
    transitions: list[Transition] = []
    for s, letter, d, marks in a.transitions:
        if s not in q_n:
            continue
        if d in q_n:
            transitions.append((renum[s], letter, renum[d], marks | allbit))
        else:
            transitions.append((renum[s], letter, trap, 0))
    for letter in range(a.n_letters):
        transitions.append((trap, letter, trap, 0))
    restricted = Tela(
        ap=a.ap,
        n_states=trap + 1,
        initial=frozenset(renum[q] for q in n_initial),
        transitions=tuple(dict.fromkeys(transitions)),
        acceptance=and_([a.acceptance, Inf(allbit)]),
        n_marks=a.n_marks + 1,
    )
    lasso = accepting_lasso(restricted)
    if lasso is None:
        return None
    back = {i: q for q, i in renum.items()}

    def back_map(ts: tuple[Transition, ...]) -> tuple[Transition, ...]:
        return tuple(
            (back[s], letter, back[d], marks & ~allbit) for s, letter, d, marks in ts
        )

    return Lasso(prefix=back_map(lasso.prefix), cycle=back_map(lasso.cycle))


def is_limit_deterministic(a: Tela) -> bool:
    return limit_det_violation(a) is None


def is_syntactically_limit_deterministic(a: Tela) -> bool:
    """Whether every transition carrying an Inf-relevant mark lies inside the
    deterministic part.  Needs DNF acceptance."""
    dnf = dnf_structure(a.acceptance)
    q_n, _ = canonical_partition(a)
    bits = 0
    for d in dnf.disjuncts:
        for s in d.infs:
            bits |= s
    for s, _, d, marks in a.transitions:
        if marks & bits and (s in q_n or d in q_n):
            return False
    return True


def limit_det_sum(a: Tela) -> Tela:
    """Limit-deterministic automaton as a disjoint sum of per-disjunct
    determinizations."""
    a = ensure_dnf(a)
    dnf = dnf_structure(a.acceptance)
    if not dnf.disjuncts:
        return empty_language_automaton(a.ap)
    parts = []
    for disjunct in dnf.disjuncts:
        part = a.with_acceptance(disjunct_formula(disjunct), a.n_marks)
        parts.append(safra_determinize(degeneralize(remove_fin(part))))
    return reduce(sum_automata, parts)


_BpState = tuple[frozenset[int], frozenset[int], int]


def _breakpoint_explore(
    a: Tela, fin: int, infs: tuple[int, ...], seed_sets: list[frozenset[int]]
) -> tuple[list[_BpState], list[tuple[int, int, int, bool]]]:
    """Deterministic breakpoint exploration over Fin-deleted transitions.

    Returns the discovered (R, B, l) states, seeded from (R, {}, 0) for each
    given R, and the internal transitions with their break flags.
    Transitions with an empty successor set are omitted.
    """
    k = len(infs)
    by_src: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for s, letter, d, marks in a.transitions:
        if not marks & fin:
            by_src.setdefault((s, letter), []).append((d, marks))
    empty: frozenset[int] = frozenset()
    index: dict[_BpState, int] = {}
    order: list[_BpState] = []
    for r in seed_sets:
        key = (r, empty, 0)
        if key not in index:
            index[key] = len(order)
            order.append(key)
    transitions: list[tuple[int, int, int, bool]] = []
    pos = 0
    while pos < len(order):
        r, b, level = order[pos]
        pos += 1
        for letter in range(a.n_letters):
            r2: set[int] = set()
            hits: set[int] = set()
            marked = infs[level - 1] if level else 0
            for q in r:
                for d, marks in by_src.get((q, letter), ()):
                    r2.add(d)
                    if level and (marked == ALL or marks & marked):
                        hits.add(d)
            if not r2:
                continue
            if level == 0:
                key: _BpState = (frozenset(r2), empty, 1 % (k + 1))
                brk = True
            else:
                b2: set[int] = set(hits)
                for q in b:
                    for d, _ in by_src.get((q, letter), ()):
                        b2.add(d)
                if b2 == r2:
                    key = (frozenset(r2), empty, (level + 1) % (k + 1))
                    brk = True
                else:
                    key = (frozenset(r2), frozenset(b2), level)
                    brk = False
            if key not in index:
                index[key] = len(order)
                order.append(key)
            transitions.append((index[(r, b, level)], letter, index[key], brk))
    return order, transitions


def breakpoint_component(a: Tela, disjunct_index: int) -> Tela:
    """The standalone breakpoint automaton for one DNF disjunct, seeded from
    the initial state set."""
    dnf = dnf_structure(a.acceptance)
    if not 0 <= disjunct_index < len(dnf.disjuncts):
        raise TelaError(f"no disjunct {disjunct_index}")
    d = dnf.disjuncts[disjunct_index]
    seeds = [frozenset(a.initial)] if a.initial else []
    order, trans = _breakpoint_explore(a, d.fin, d.infs, seeds)
    return Tela(
        ap=a.ap,
        n_states=max(len(order), 1) if seeds else 0,
        initial=frozenset({0}) if seeds else frozenset(),
        transitions=tuple(
            (s, letter, t, 1 if brk else 0) for s, letter, t, brk in trans
        ),
        acceptance=Inf(1),
        n_marks=1,
    )


def build_ld(a: Tela) -> Tela:
    """Limit-deterministic Buchi automaton: the input as nondeterministic
    part plus per-disjunct breakpoint components entered one step behind
    any original transition."""
    dnf = dnf_structure(a.acceptance)
    n = a.n_states
    targets = sorted({d for _, _, d, _ in a.transitions})
    seeds = [frozenset({q}) for q in targets]
    transitions: list[Transition] = [
        (s, letter, d, 0) for s, letter, d, _ in a.transitions
    ]
    offset = n
    for disjunct in dnf.disjuncts:
        order, trans = _breakpoint_explore(a, disjunct.fin, disjunct.infs, seeds)
        index = {state: offset + j for j, state in enumerate(order)}
        for si, letter, di, brk in trans:
            transitions.append((offset + si, letter, offset + di, 1 if brk else 0))
        empty: frozenset[int] = frozenset()
        for s, letter, d, _ in a.transitions:
            transitions.append((s, letter, index[(frozenset({d}), empty, 0)], 0))
        offset += len(order)
    return Tela(
        ap=a.ap,
        n_states=offset,
        initial=a.initial,
        transitions=tuple(dict.fromkeys(transitions)),
        acceptance=Inf(1),
        n_marks=1,
    )


def build_gfm(a: Tela, singleton_bridges: bool = False) -> Tela:
    """Good-for-MDP limit-deterministic Buchi automaton.

    The nondeterministic part is the subset automaton; from a subset state,
    on each letter, bridges lead into every breakpoint component seeded with
    any nonempty subset of the successor set.  With singleton_bridges only
    one-state seeds are offered, which keeps the language but loses the
    good-for-MDP property.
    """
    if a.n_states > GFM_STATE_LIMIT:
        raise TelaError(
            f"good-for-MDP construction is limited to {GFM_STATE_LIMIT} states"
        )
    dnf = dnf_structure(a.acceptance)
    p0 = frozenset(a.initial)
    sub_index: dict[frozenset[int], int] = {p0: 0}
    sub_order: list[frozenset[int]] = [p0]
    sub_trans: list[tuple[int, int, int]] = []
    bridge_plans: list[tuple[int, int, list[frozenset[int]]]] = []
    pos = 0
    while pos < len(sub_order):
        p = sub_order[pos]
        pos += 1
        for letter in range(a.n_letters):
            theta = frozenset(
                d for q in p for _, _, d, _ in a.succ(q, letter)
            )
            if not theta:
                continue
            if theta not in sub_index:
                sub_index[theta] = len(sub_order)
                sub_order.append(theta)
            sub_trans.append((sub_index[p], letter, sub_index[theta]))
            members = sorted(theta)
            if singleton_bridges:
                choices = [frozenset({q}) for q in members]
            else:
                choices = [
                    frozenset(
                        q for bit, q in enumerate(members) if mask >> bit & 1
                    )
                    for mask in range(1, 1 << len(members))
                ]
            bridge_plans.append((sub_index[p], letter, choices))
    seeds: list[frozenset[int]] = []
    seen: set[frozenset[int]] = set()
    for _, _, choices in bridge_plans:
        for r in choices:
            if r not in seen:
                seen.add(r)
                seeds.append(r)
    transitions: list[Transition] = [
        (s, letter, d, 0) for s, letter, d in sub_trans
    ]
    offset = len(sub_order)
    empty: frozenset[int] = frozenset()
    for disjunct in dnf.disjuncts:
        order, trans = _breakpoint_explore(a, disjunct.fin, disjunct.infs, seeds)
        index = {state: offset + j for j, state in enumerate(order)}
        for si, letter, di, brk in trans:
            transitions.append((offset + si, letter, offset + di, 1 if brk else 0))
        for src, letter, choices in bridge_plans:
            for r in choices:
                transitions.append((src, letter, index[(r, empty, 0)], 0))
        offset += len(order)
    return Tela(
        ap=a.ap,
        n_states=offset,
        initial=frozenset({0}),
        transitions=tuple(dict.fromkeys(transitions)),
        acceptance=Inf(1),
        n_marks=1,
    )
