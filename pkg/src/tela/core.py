"""Transition-based Emerson-Lei automata (TELA) and structural operations.

A TELA runs over an explicit alphabet: every letter is one truth assignment
to the declared atomic propositions, encoded as the integer whose bit i gives
the value of ap[i].  Transitions are (src, letter, dst, marks) tuples with
marks a bitmask of acceptance mark indices.  A run is accepting iff the set
of marks occurring on infinitely many of its transitions satisfies the
acceptance condition.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

from .acceptance import (
    Acceptance,
    Inf,
    Or,
    and_,
    all_marks,
    evaluate,
    negate,
    offset_marks,
    or_,
)

MAX_AP = 8

Transition = tuple[int, int, int, int]


class TelaError(ValueError):
    pass


@dataclass(frozen=True)
class Tela:
    ap: tuple[str, ...]
    n_states: int
    initial: frozenset[int]
    transitions: tuple[Transition, ...]
    acceptance: Acceptance
    n_marks: int

    def __post_init__(self) -> None:
        if len(self.ap) > MAX_AP:
            raise TelaError(f"at most {MAX_AP} atomic propositions, got {len(self.ap)}")
        if len(set(self.ap)) != len(self.ap):
            raise TelaError("duplicate atomic proposition names")
        if self.n_states < 0:
            raise TelaError("negative state count")
        for q in self.initial:
            if not 0 <= q < self.n_states:
                raise TelaError(f"initial state {q} out of range")
        n_letters = 1 << len(self.ap)
        mark_space = (1 << self.n_marks) - 1
        seen = set()
        for t in self.transitions:
            src, letter, dst, marks = t
            if not (0 <= src < self.n_states and 0 <= dst < self.n_states):
                raise TelaError(f"transition {t} has a state out of range")
            if not 0 <= letter < n_letters:
                raise TelaError(f"transition {t} has a letter out of range")
            if marks & ~mark_space:
                raise TelaError(f"transition {t} uses marks beyond {self.n_marks}")
            if t in seen:
                raise TelaError(f"duplicate transition {t}")
            seen.add(t)
        if all_marks(self.acceptance) & ~mark_space:
            raise TelaError(
                f"acceptance references marks beyond the declared {self.n_marks}"
            )
        # Canonical transition order makes structural equality independent of
        # construction order and HOA round trips exact.
        object.__setattr__(self, "transitions", tuple(sorted(self.transitions)))

    @property
    def n_letters(self) -> int:
        return 1 << len(self.ap)

    @cached_property
    def _succ(self) -> dict[tuple[int, int], tuple[Transition, ...]]:
        table: dict[tuple[int, int], list[Transition]] = {}
        for t in self.transitions:
            table.setdefault((t[0], t[1]), []).append(t)
        return {k: tuple(v) for k, v in table.items()}

    def succ(self, state: int, letter: int) -> tuple[Transition, ...]:
        return self._succ.get((state, letter), ())

    def with_acceptance(self, acceptance: Acceptance, n_marks: int) -> "Tela":
        return replace(self, acceptance=acceptance, n_marks=n_marks)


def with_all_mark(a: Tela) -> tuple[Tela, int]:
    """Add a fresh mark carried by every transition; returns (automaton, mark index)."""
    mark = a.n_marks
    bit = 1 << mark
    return (
        Tela(
            ap=a.ap,
            n_states=a.n_states,
            initial=a.initial,
            transitions=tuple((s, l, d, m | bit) for (s, l, d, m) in a.transitions),
            acceptance=a.acceptance,
            n_marks=mark + 1,
        ),
        mark,
    )


@dataclass(frozen=True)
class Lasso:
    """A finite prefix followed by a non-empty cycle, both transition lists."""

    prefix: tuple[Transition, ...]
    cycle: tuple[Transition, ...]

    def __post_init__(self) -> None:
        if not self.cycle:
            raise TelaError("lasso cycle must be non-empty")

    def word(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """The lasso word (u, v) of letters."""
        return (
            tuple(t[1] for t in self.prefix),
            tuple(t[1] for t in self.cycle),
        )

    def cycle_marks(self) -> int:
        bits = 0
        for t in self.cycle:
            bits |= t[3]
        return bits


def is_deterministic(a: Tela) -> bool:
    """One initial state and at most one transition per (state, letter)."""
    if len(a.initial) != 1:
        return False
    seen = set()
    for src, letter, _dst, _marks in a.transitions:
        if (src, letter) in seen:
            return False
        seen.add((src, letter))
    return True


def is_complete(a: Tela) -> bool:
    """At least one transition per (state, letter) and at least one initial state."""
    if not a.initial and a.n_states:
        return False
    present = {(t[0], t[1]) for t in a.transitions}
    return all(
        (q, letter) in present
        for q in range(a.n_states)
        for letter in range(a.n_letters)
    )


def complete(a: Tela) -> Tela:
    """Add a rejecting sink for missing (state, letter) slots; no-op if complete.

    If the acceptance condition holds on runs that see no marks at all (for
    example a pure Fin condition), runs trapped in the sink would wrongly
    accept; in that case a fresh mark is put on every original transition and
    conjoined as Inf to the acceptance, which rejects exactly the sink runs.
    """
    if is_complete(a):
        return a
    sink = a.n_states
    acceptance = a.acceptance
    n_marks = a.n_marks
    transitions = list(a.transitions)
    if evaluate(0, acceptance):
        guard = 1 << n_marks
        transitions = [(s, l, d, m | guard) for (s, l, d, m) in transitions]
        acceptance = and_([acceptance, Inf(guard)])
        n_marks += 1
    present = {(t[0], t[1]) for t in a.transitions}
    for q in range(a.n_states):
        for letter in range(a.n_letters):
            if (q, letter) not in present:
                transitions.append((q, letter, sink, 0))
    for letter in range(a.n_letters):
        transitions.append((sink, letter, sink, 0))
    return Tela(
        ap=a.ap,
        n_states=a.n_states + 1,
        initial=a.initial if a.initial else frozenset({sink}),
        transitions=tuple(transitions),
        acceptance=acceptance,
        n_marks=n_marks,
    )


def split(a: Tela) -> list[Tela]:
    """One automaton per top-level disjunct of the acceptance condition.

    The union of the component languages is the language of `a`; structure is
    shared, only the acceptance differs.
    """
    if not isinstance(a.acceptance, Or):
        return [a]
    return [a.with_acceptance(part, a.n_marks) for part in a.acceptance.parts]


def sum_automata(a0: Tela, a1: Tela) -> Tela:
    """Disjoint union recognizing the union language; both inputs complete.

    Component-1 states and marks are renumbered with offsets.  Two fresh
    marks tag the transitions of each component so that a run through
    component i can only satisfy the (lifted) condition of component i:
    the acceptance is (acc0 & Inf(e0)) | (acc1 & Inf(e1)).
    """
    _require_same_ap(a0, a1)
    for name, a in (("first", a0), ("second", a1)):
        if not is_complete(a):
            raise TelaError(f"sum requires complete automata; {name} input is not")
    off_states = a0.n_states
    off_marks = a0.n_marks
    e0 = 1 << (a0.n_marks + a1.n_marks)
    e1 = e0 << 1
    transitions = [(s, l, d, m | e0) for (s, l, d, m) in a0.transitions]
    transitions += [
        (s + off_states, l, d + off_states, (m << off_marks) | e1)
        for (s, l, d, m) in a1.transitions
    ]
    acceptance = or_(
        [
            and_([a0.acceptance, Inf(e0)]),
            and_([offset_marks(a1.acceptance, off_marks), Inf(e1)]),
        ]
    )
    return Tela(
        ap=a0.ap,
        n_states=a0.n_states + a1.n_states,
        initial=a0.initial | frozenset(q + off_states for q in a1.initial),
        transitions=tuple(transitions),
        acceptance=acceptance,
        n_marks=a0.n_marks + a1.n_marks + 2,
    )


def sum_gba(a0: Tela, a1: Tela) -> Tela:
    """Disjoint union of two generalized-Buchi automata, staying GBA.

    The shorter condition is padded with Inf over all own transitions until
    both have k sets, then set j of the result marks a transition iff the
    component's set j did (or the set is padding).  The result has exactly
    k marks and acceptance /\\ Inf(j).
    """
    from .acceptance import gba_marksets

    _require_same_ap(a0, a1)
    sets0 = gba_marksets(a0.acceptance)
    sets1 = gba_marksets(a1.acceptance)
    if sets0 is None or sets1 is None:
        raise TelaError("sum_gba requires generalized-Buchi acceptance on both inputs")
    for name, a in (("first", a0), ("second", a1)):
        if not is_complete(a):
            raise TelaError(f"sum_gba requires complete automata; {name} input is not")
    k = max(len(sets0), len(sets1), 1)

    def renumber(a: Tela, sets: list[int], state_off: int) -> list[Transition]:
        out = []
        for s, l, d, m in a.transitions:
            bits = 0
            for j in range(k):
                if j >= len(sets) or m & sets[j]:
                    bits |= 1 << j
            out.append((s + state_off, l, d + state_off, bits))
        return out

    transitions = renumber(a0, sets0, 0) + renumber(a1, sets1, a0.n_states)
    return Tela(
        ap=a0.ap,
        n_states=a0.n_states + a1.n_states,
        initial=a0.initial | frozenset(q + a0.n_states for q in a1.initial),
        transitions=tuple(transitions),
        acceptance=and_([Inf(1 << j) for j in range(k)]),
        n_marks=k,
    )


def product(a0: Tela, a1: Tela, combinator: str) -> Tela:
    """Synchronized product on the reachable pair space.

    combinator "or" recognizes the union language (both inputs complete),
    "and" the intersection (both inputs deterministic and complete).
    Transition marks are the union of the component marks, component 1
    offset; acceptance is the lifted combination.
    """
    if combinator not in ("or", "and"):
        raise TelaError(f"unknown product combinator {combinator!r}")
    _require_same_ap(a0, a1)
    for name, a in (("first", a0), ("second", a1)):
        if not is_complete(a):
            raise TelaError(f"product requires complete automata; {name} input is not")
    if combinator == "and":
        for name, a in (("first", a0), ("second", a1)):
            if not is_deterministic(a):
                raise TelaError(
                    f"product(and) requires deterministic automata; {name} input is not"
                )
    off = a0.n_marks
    initial_pairs = sorted((q0, q1) for q0 in a0.initial for q1 in a1.initial)
    index: dict[tuple[int, int], int] = {}
    order: list[tuple[int, int]] = []
    for pair in initial_pairs:
        if pair not in index:
            index[pair] = len(order)
            order.append(pair)
    transitions: list[Transition] = []
    pos = 0
    while pos < len(order):
        q0, q1 = order[pos]
        src = index[(q0, q1)]
        for letter in range(a0.n_letters):
            for _, _, d0, m0 in a0.succ(q0, letter):
                for _, _, d1, m1 in a1.succ(q1, letter):
                    pair = (d0, d1)
                    if pair not in index:
                        index[pair] = len(order)
                        order.append(pair)
                    transitions.append((src, letter, index[pair], m0 | (m1 << off)))
        pos += 1
    lifted0 = a0.acceptance
    lifted1 = offset_marks(a1.acceptance, off)
    acceptance = (
        or_([lifted0, lifted1]) if combinator == "or" else and_([lifted0, lifted1])
    )
    return Tela(
        ap=a0.ap,
        n_states=len(order),
        initial=frozenset(index[p] for p in initial_pairs),
        transitions=tuple(transitions),
        acceptance=acceptance,
        n_marks=a0.n_marks + a1.n_marks,
    )


def complement_deterministic(a: Tela) -> Tela:
    """Complement a deterministic complete automaton by negating the acceptance."""
    if not is_deterministic(a):
        raise TelaError("complement requires a deterministic automaton")
    if not is_complete(a):
        raise TelaError("complement requires a complete automaton")
    return a.with_acceptance(negate(a.acceptance), a.n_marks)


def reachable_states(a: Tela) -> frozenset[int]:
    seen = set(a.initial)
    frontier = sorted(seen)
    while frontier:
        nxt = []
        for q in frontier:
            for letter in range(a.n_letters):
                for _, _, d, _ in a.succ(q, letter):
                    if d not in seen:
                        seen.add(d)
                        nxt.append(d)
        frontier = sorted(nxt)
    return frozenset(seen)


def tarjan_scc(nodes, adj) -> list[frozenset]:
    """Strongly connected components of a digraph, iterative Tarjan.

    `nodes` fixes the visiting order, `adj` maps node -> successor list.
    Trivial one-node components are included.
    """
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    counter = 0
    components: list[frozenset] = []

    for root in nodes:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            node, child_pos = work[-1]
            if child_pos == 0:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            advanced = False
            successors = adj.get(node, ())
            for i in range(child_pos, len(successors)):
                succ = successors[i]
                if succ not in index:
                    work[-1] = (node, i + 1)
                    work.append((succ, 0))
                    advanced = True
                    break
                if succ in on_stack:
                    low[node] = min(low[node], index[succ])
            if advanced:
                continue
            work.pop()
            if low[node] == index[node]:
                comp = set()
                while True:
                    q = stack.pop()
                    on_stack.discard(q)
                    comp.add(q)
                    if q == node:
                        break
                components.append(frozenset(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return components


def sccs(a: Tela) -> list[frozenset[int]]:
    """Strongly connected components, ordered by smallest contained state."""
    adj: dict[int, list[int]] = {q: [] for q in range(a.n_states)}
    for s, _, d, _ in a.transitions:
        adj[s].append(d)
    components = tarjan_scc(range(a.n_states), adj)
    components.sort(key=min)
    return components


def _require_same_ap(a0: Tela, a1: Tela) -> None:
    if a0.ap != a1.ap:
        raise TelaError(
            f"mismatched atomic propositions: {a0.ap} vs {a1.ap}"
        )
