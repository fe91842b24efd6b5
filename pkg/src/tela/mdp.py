"""Markov decision processes labelled with atomic propositions, their
product with automata, and probabilistic model checking.

The text format is line oriented; `#` starts a comment:

    states 3
    initial 0
    label 0 {a}
    label 1 {a,b}
    trans 0 act 1 1/2
    trans 0 act 2 1/2

Probabilities are exact rationals; each (state, action) distribution must
sum to one.  States without a `label` line carry the empty label.

The product with an automaton reads the label of the current MDP state:
a product action pairs an MDP action with one automaton transition over
that letter, so a strategy resolves both kinds of nondeterminism.  Maximal
end components are computed by the usual iteration that prunes actions
leaving the candidate component.  Maximal reachability probabilities come
from interval iteration on the MEC quotient, which is free of end
components, so both value bounds converge; iteration stops at width 1e-9.

qualitative_positive decides whether the maximal probability of the
automaton's language is positive; it needs a limit-deterministic automaton.
pr_max_tela computes the maximal probability for any TELA by building the
good-for-MDP automaton first, so the input automaton must stay within that
construction's size limit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .acceptance import Acceptance, ALL, dnf_structure, gba_marksets, to_dnf
from .core import Tela, TelaError, complete, tarjan_scc
from .limitdet import build_gfm, limit_det_violation
from .transforms import ensure_dnf

REACH_TOLERANCE = 1e-9


class MdpError(ValueError):
    pass


class MdpParseError(MdpError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class NotLimitDeterministicError(TelaError):
    """Raised when an analysis that needs a limit-deterministic automaton
    gets one with an accepting cycle in its nondeterministic part."""

    def __init__(self, message: str, witness):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class MdpAction:
    name: str
    dist: tuple[tuple[int, Fraction], ...]


@dataclass(frozen=True)
class Mdp:
    n_states: int
    initial: int
    labels: tuple[frozenset[str], ...]
    actions: tuple[tuple[MdpAction, ...], ...]

    def __post_init__(self):
        if self.n_states <= 0:
            raise MdpError("an MDP needs at least one state")
        if not 0 <= self.initial < self.n_states:
            raise MdpError(f"initial state {self.initial} out of range")
        if len(self.labels) != self.n_states or len(self.actions) != self.n_states:
            raise MdpError("labels and actions must cover every state")
        for s, acts in enumerate(self.actions):
            if not acts:
                raise MdpError(f"state {s} has no action")
            for act in acts:
                total = Fraction(0)
                seen: set[int] = set()
                for t, p in act.dist:
                    if not 0 <= t < self.n_states:
                        raise MdpError(f"transition target {t} out of range")
                    if t in seen:
                        raise MdpError(
                            f"duplicate target {t} in {s} --{act.name}-->"
                        )
                    seen.add(t)
                    if p <= 0:
                        raise MdpError("probabilities must be positive")
                    total += p
                if total != 1:
                    raise MdpError(
                        f"distribution of {s} --{act.name}--> sums to {total}"
                    )


def parse_mdp(text: str) -> Mdp:
    n_states: int | None = None
    initial = 0
    labels: dict[int, frozenset[str]] = {}
    order: list[tuple[int, str]] = []
    dists: dict[tuple[int, str], list[tuple[int, Fraction]]] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "states":
                if n_states is not None:
                    raise ValueError("duplicate states line")
                n_states = int(parts[1])
            elif kind == "initial":
                initial = int(parts[1])
            elif kind == "label":
                s = int(parts[1])
                body = line.split(None, 2)[2]
                if not (body.startswith("{") and body.endswith("}")):
                    raise ValueError("label needs a {...} set")
                if s in labels:
                    raise ValueError(f"duplicate label for state {s}")
                inner = body[1:-1].strip()
                names = [x.strip() for x in inner.split(",")] if inner else []
                if any(not x for x in names):
                    raise ValueError("empty atomic proposition name")
                labels[s] = frozenset(names)
            elif kind == "trans":
                if len(parts) != 5:
                    raise ValueError("trans needs: source action target prob")
                s = int(parts[1])
                name = parts[2]
                t = int(parts[3])
                p = Fraction(parts[4])
                key = (s, name)
                if key not in dists:
                    dists[key] = []
                    order.append(key)
                if any(t == t0 for t0, _ in dists[key]):
                    raise ValueError(
                        f"duplicate transition {s} --{name}--> {t}"
                    )
                dists[key].append((t, p))
            else:
                raise ValueError(f"unknown directive {kind!r}")
        except MdpParseError:
            raise
        except (ValueError, IndexError, ZeroDivisionError) as exc:
            raise MdpParseError(lineno, str(exc) or "malformed line") from exc
    if n_states is None:
        raise MdpParseError(0, "missing states line")
    actions: list[list[MdpAction]] = [[] for _ in range(n_states)]
    for s, name in order:
        if not 0 <= s < n_states:
            raise MdpError(f"transition source {s} out of range")
        actions[s].append(MdpAction(name, tuple(dists[(s, name)])))
    for s in labels:
        if not 0 <= s < n_states:
            raise MdpError(f"label for unknown state {s}")
    return Mdp(
        n_states=n_states,
        initial=initial,
        labels=tuple(labels.get(s, frozenset()) for s in range(n_states)),
        actions=tuple(tuple(acts) for acts in actions),
    )


@dataclass(frozen=True)
class ProductAction:
    name: str
    marks: int
    dist: tuple[tuple[int, Fraction], ...]


@dataclass(frozen=True)
class ProductMdp:
    states: tuple[tuple[int, int], ...]
    initial: int
    actions: tuple[tuple[ProductAction, ...], ...]
    acceptance: Acceptance
    n_marks: int

    @property
    def n_states(self) -> int:
        return len(self.states)


def _state_letters(m: Mdp, a: Tela) -> list[int]:
    """The automaton letter read in each MDP state."""
    alphabet = set(a.ap)
    letters = []
    for s in range(m.n_states):
        unknown = m.labels[s] - alphabet
        if unknown:
            raise MdpError(
                f"label of state {s} uses {sorted(unknown)}, which the "
                "automaton alphabet does not contain"
            )
        letter = 0
        for i, name in enumerate(a.ap):
            if name in m.labels[s]:
                letter |= 1 << i
        letters.append(letter)
    return letters


def _explore_product(
    m: Mdp, a: Tela, aut_initial: list[int], strict: bool
) -> tuple[list[tuple[int, int]], list[list[ProductAction]]]:
    letters = _state_letters(m, a)
    index: dict[tuple[int, int], int] = {}
    order: list[tuple[int, int]] = []
    for q in aut_initial:
        key = (m.initial, q)
        if key not in index:
            index[key] = len(order)
            order.append(key)
    actions: list[list[ProductAction]] = []
    pos = 0
    while pos < len(order):
        s, q = order[pos]
        pos += 1
        here: list[ProductAction] = []
        moves = a.succ(q, letters[s])
        if not moves and strict:
            label = "{" + ",".join(sorted(m.labels[s])) + "}"
            raise MdpError(
                f"automaton state {q} has no transition for label {label}; "
                "complete the automaton first"
            )
        for act in m.actions[s]:
            for _, _, q2, marks in moves:
                dist = []
                for t, p in act.dist:
                    key = (t, q2)
                    if key not in index:
                        index[key] = len(order)
                        order.append(key)
                    dist.append((index[key], p))
                here.append(ProductAction(act.name, marks, tuple(dist)))
        actions.append(here)
    return order, actions


def mdp_product(m: Mdp, a: Tela) -> ProductMdp:
    """Product of an MDP with an automaton along the generated label word."""
    if len(a.initial) != 1:
        raise MdpError("the product needs exactly one initial automaton state")
    states, actions = _explore_product(m, a, sorted(a.initial), strict=True)
    return ProductMdp(
        states=tuple(states),
        initial=0,
        actions=tuple(tuple(acts) for acts in actions),
        acceptance=a.acceptance,
        n_marks=a.n_marks,
    )


@dataclass(frozen=True)
class EndComponent:
    states: frozenset[int]
    actions: dict[int, tuple[int, ...]]


def _mec_decompose(
    n_states: int, enabled: list[list[tuple[int, tuple[int, ...]]]]
) -> list[EndComponent]:
    """Maximal end components of an action view.

    enabled[s] lists (action id, successor states).  States may have no
    actions; they simply belong to no end component.
    """
    alive = set(range(n_states))
    act: dict[int, dict[int, tuple[int, ...]]] = {
        s: {aid: support for aid, support in enabled[s]} for s in range(n_states)
    }
    while True:
        changed = False
        for s in sorted(alive):
            for aid in list(act[s]):
                if any(t not in alive for t in act[s][aid]):
                    del act[s][aid]
                    changed = True
        adj = {
            s: sorted({t for support in act[s].values() for t in support})
            for s in alive
        }
        comps = tarjan_scc(sorted(alive), adj)
        comp_of: dict[int, frozenset[int]] = {}
        for comp in comps:
            for s in comp:
                comp_of[s] = comp
        for s in sorted(alive):
            for aid in list(act[s]):
                if any(t not in comp_of[s] for t in act[s][aid]):
                    del act[s][aid]
                    changed = True
        dead = {s for s in alive if not act[s]}
        if dead:
            alive -= dead
            changed = True
        if not changed:
            break
    adj = {
        s: sorted({t for support in act[s].values() for t in support})
        for s in alive
    }
    comps = tarjan_scc(sorted(alive), adj)
    out = []
    for comp in sorted(comps, key=min):
        out.append(
            EndComponent(
                states=comp,
                actions={s: tuple(sorted(act[s])) for s in sorted(comp)},
            )
        )
    return out


def mec_decomposition(p: ProductMdp | Mdp) -> list[EndComponent]:
    """Maximal end components, with actions given as indices into each
    state's action tuple."""
    view = [
        [(i, tuple(t for t, _ in act.dist)) for i, act in enumerate(acts)]
        for acts in p.actions
    ]
    return _mec_decompose(len(p.actions), view)


def qualitative_positive(m: Mdp, a: Tela) -> bool:
    """Whether the maximal probability of generating a word in the
    automaton's language is positive.

    The automaton must be limit-deterministic.  The criterion: some maximal
    end component of the product, after deleting one disjunct's Fin
    transitions, contains an action for every Inf set of that disjunct.
    """
    witness = limit_det_violation(a)
    if witness is not None:
        states = [t[0] for t in witness.cycle]
        raise NotLimitDeterministicError(
            "automaton is not limit-deterministic: accepting cycle through "
            f"nondeterministic states {sorted(set(states))}",
            witness,
        )
    a = ensure_dnf(a)
    dnf = dnf_structure(a.acceptance)
    if not dnf.disjuncts or not a.initial:
        return False
    _, actions = _explore_product(m, a, sorted(a.initial), strict=False)
    by_fin: dict[int, list[int]] = {}
    for i, d in enumerate(dnf.disjuncts):
        by_fin.setdefault(d.fin, []).append(i)
    for fin, disjunct_ids in sorted(by_fin.items()):
        view = [
            [
                (i, tuple(t for t, _ in act.dist))
                for i, act in enumerate(acts)
                if not act.marks & fin
            ]
            for acts in actions
        ]
        mecs = _mec_decompose(len(actions), view)
        for mec in mecs:
            marks = 0
            for s, aids in mec.actions.items():
                for aid in aids:
                    marks |= actions[s][aid].marks
            for i in disjunct_ids:
                if all(marks & s for s in dnf.disjuncts[i].infs):
                    return True
    return False


def _max_reach(
    dists: list[list[tuple[tuple[int, float], ...]]],
    initial: int,
    target: set[int],
    tol: float = REACH_TOLERANCE,
) -> float:
    """Maximal probability of reaching the target set, by interval iteration
    on the MEC quotient."""
    n = len(dists)
    if initial in target:
        return 1.0
    view = [
        [(i, tuple(t for t, _ in d)) for i, d in enumerate(state_dists)]
        for state_dists in dists
    ]
    mecs = _mec_decompose(n, view)
    node_of = list(range(n))
    block_of: dict[int, frozenset[int]] = {}
    for mec in mecs:
        for s in mec.states:
            block_of[s] = mec.states
    nodes: list[frozenset[int]] = []
    assigned: dict[int, int] = {}
    for s in range(n):
        if s in assigned:
            node_of[s] = assigned[s]
            continue
        block = block_of.get(s, frozenset({s}))
        nid = len(nodes)
        nodes.append(block)
        for q in block:
            assigned[q] = nid
        node_of[s] = nid
    target_nodes = {node_of[s] for s in target}
    q_actions: list[list[dict[int, float]]] = [[] for _ in nodes]
    for s in range(n):
        nid = node_of[s]
        if nid in target_nodes:
            continue
        for d in dists[s]:
            agg: dict[int, float] = {}
            for t, p in d:
                agg[node_of[t]] = agg.get(node_of[t], 0.0) + p
            if set(agg) == {nid}:
                continue
            q_actions[nid].append(agg)
    rev: dict[int, set[int]] = {}
    for nid, acts in enumerate(q_actions):
        for agg in acts:
            for t in agg:
                rev.setdefault(t, set()).add(nid)
    can = set(target_nodes)
    frontier = list(target_nodes)
    while frontier:
        t = frontier.pop()
        for s in rev.get(t, ()):
            if s not in can:
                can.add(s)
                frontier.append(s)
    lo = [1.0 if nid in target_nodes else 0.0 for nid in range(len(nodes))]
    hi = [1.0 if nid in can else 0.0 for nid in range(len(nodes))]
    free = [
        nid
        for nid in range(len(nodes))
        if nid in can and nid not in target_nodes
    ]
    for _ in range(1_000_000):
        width = 0.0
        for nid in free:
            best_lo = 0.0
            best_hi = 0.0
            for agg in q_actions[nid]:
                best_lo = max(best_lo, sum(p * lo[t] for t, p in agg.items()))
                best_hi = max(best_hi, sum(p * hi[t] for t, p in agg.items()))
            lo[nid] = best_lo
            hi[nid] = best_hi
            width = max(width, hi[nid] - lo[nid])
        if width < tol:
            break
    else:
        raise MdpError("value iteration did not converge")
    node = node_of[initial]
    return (lo[node] + hi[node]) / 2


def _float_dists(
    actions: tuple[tuple[ProductAction, ...], ...]
) -> list[list[tuple[tuple[int, float], ...]]]:
    return [
        [tuple((t, float(p)) for t, p in act.dist) for act in acts]
        for acts in actions
    ]


def pr_max_buchi(p: ProductMdp) -> float:
    """Maximal probability of seeing an accepting mark infinitely often.

    The product must carry Buchi acceptance; end components containing an
    accepting action become the reachability target.
    """
    sets = gba_marksets(p.acceptance)
    if sets is None or len(sets) != 1:
        raise MdpError("pr_max_buchi needs Buchi acceptance")
    bits = sets[0]
    target: set[int] = set()
    for mec in mec_decomposition(p):
        if any(
            p.actions[s][aid].marks & bits
            for s, aids in mec.actions.items()
            for aid in aids
        ):
            target |= mec.states
    if not target:
        return 0.0
    return _max_reach(_float_dists(p.actions), p.initial, target)


def pr_max_tela(m: Mdp, a: Tela) -> float:
    """Maximal probability that the MDP generates a word the TELA accepts,
    via the good-for-MDP construction."""
    g = complete(build_gfm(ensure_dnf(a)))
    return pr_max_buchi(mdp_product(m, g))


def reference_pr_max(m: Mdp, a: Tela) -> float:
    """Same value as pr_max_tela, computed along an unrelated route: full
    determinization, then the standard analysis of the deterministic
    product.  Serves as a cross-check."""
    from .determinize import determinize_product

    d = determinize_product(a)
    prod = mdp_product(m, d)
    dnf = to_dnf(d.acceptance)
    target: set[int] = set()
    for disjunct in dnf.disjuncts:
        view = [
            [
                (i, tuple(t for t, _ in act.dist))
                for i, act in enumerate(acts)
                if not act.marks & disjunct.fin
            ]
            for acts in prod.actions
        ]
        for mec in _mec_decompose(len(prod.actions), view):
            marks = 0
            for s, aids in mec.actions.items():
                for aid in aids:
                    marks |= prod.actions[s][aid].marks
            if all(s == ALL or marks & s for s in disjunct.infs):
                target |= mec.states
    if not target:
        return 0.0
    return _max_reach(_float_dists(prod.actions), prod.initial, target)
