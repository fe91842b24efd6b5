"""Shared builders: the running example automaton and Markov chain, plus
small seeded generators for automata and MDPs that stay within oracle reach.
"""

from __future__ import annotations

import random

from tela import (
    Inf,
    Mdp,
    Tela,
    and_,
    dnf_length,
    fin_,
    inf_,
    or_,
    parse_mdp,
    to_dnf,
)


def example_automaton() -> Tela:
    """Eight-state automaton guessing two-letter blocks.

    States 0..3 expect a_i then b_j, states 4..7 expect b_i then a_j, and
    every transition is accepting, so the language is any infinite
    alternation of an a-letter and a b-letter.  Letters: 0 = a1, 1 = a2,
    2 = b1, 3 = b2.
    """
    trans = []
    for i in (0, 1):
        for j in (0, 1):
            src = 2 * i + j
            for k in (0, 1):
                trans.append((src, i, 4 + 2 * j + k, 1))
    for i in (0, 1):
        for j in (0, 1):
            src = 4 + 2 * i + j
            for k in (0, 1):
                trans.append((src, 2 + i, 2 * j + k, 1))
    return Tela(
        ap=("p", "q"),
        n_states=8,
        initial=frozenset({0, 1, 2, 3}),
        transitions=tuple(trans),
        acceptance=Inf(1),
        n_marks=1,
    )


EXAMPLE_MDP = """\
states 4
initial 0
label 0 {}
label 1 {p}
label 2 {q}
label 3 {p,q}
trans 0 go 2 1/2
trans 0 go 3 1/2
trans 1 go 2 1/2
trans 1 go 3 1/2
trans 2 go 0 1/2
trans 2 go 1 1/2
trans 3 go 0 1/2
trans 3 go 1 1/2
"""


def example_mdp() -> Mdp:
    return parse_mdp(EXAMPLE_MDP)


def random_formula(rng: random.Random, n_marks: int, depth: int = 3):
    """Random acceptance tree over single- or two-mark atoms."""
    kind = rng.randrange(4) if depth > 0 else rng.randrange(2)
    if kind < 2:
        mask = 1 << rng.randrange(n_marks)
        if rng.random() < 0.4:
            mask |= 1 << rng.randrange(n_marks)
        return inf_(mask) if kind == 0 else fin_(mask)
    parts = [random_formula(rng, n_marks, depth - 1) for _ in range(2)]
    return and_(parts) if kind == 2 else or_(parts)


def random_dnf_formula(rng: random.Random, n_marks: int):
    """Random formula that is already a small syntactic DNF."""
    disjuncts = []
    for _ in range(rng.randint(1, 3)):
        atoms = [
            inf_(1 << rng.randrange(n_marks)) for _ in range(rng.randint(1, 3))
        ]
        if rng.random() < 0.5:
            atoms.append(fin_(1 << rng.randrange(n_marks)))
        disjuncts.append(and_(atoms))
    return or_(disjuncts)


def random_automaton(
    rng: random.Random,
    max_states: int = 4,
    n_marks: int = 3,
    n_ap: int = 1,
    density: float = 0.5,
    mark_prob: float = 0.3,
    dnf_only: bool = False,
    max_dnf_atoms: int | None = None,
    ap: tuple[str, ...] | None = None,
) -> Tela:
    """Small random automaton; unlike the library generator it also covers
    the one-to-three state range the brute-force oracles need."""
    n = rng.randint(1, max_states)
    names = ap if ap is not None else tuple("abcdefgh"[:n_ap])
    n_letters = 1 << len(names)
    trans = []
    while not trans:
        for q in range(n):
            for letter in range(n_letters):
                for d in range(n):
                    if rng.random() < density:
                        marks = 0
                        for b in range(n_marks):
                            if rng.random() < mark_prob:
                                marks |= 1 << b
                        trans.append((q, letter, d, marks))
    while True:
        phi = (
            random_dnf_formula(rng, n_marks)
            if dnf_only
            else random_formula(rng, n_marks)
        )
        if max_dnf_atoms is None or dnf_length(to_dnf(phi)) <= max_dnf_atoms:
            break
    initial = frozenset(rng.sample(range(n), rng.randint(1, n)))
    return Tela(
        ap=names,
        n_states=n,
        initial=initial,
        transitions=tuple(trans),
        acceptance=phi,
        n_marks=n_marks,
    )


def random_mdp(
    rng: random.Random, max_states: int = 3, atoms: tuple[str, ...] = ("p", "q")
) -> Mdp:
    """Small random MDP in text form, with one or two actions per state."""
    n = rng.randint(1, max_states)
    lines = [f"states {n}", "initial 0"]
    for s in range(n):
        chosen = sorted(x for x in atoms if rng.random() < 0.5)
        lines.append(f"label {s} {{{','.join(chosen)}}}")
    for s in range(n):
        for i in range(rng.randint(1, 2)):
            if n == 1 or rng.random() < 0.4:
                lines.append(f"trans {s} a{i} {rng.randrange(n)} 1")
            else:
                t1, t2 = rng.sample(range(n), 2)
                lines.append(f"trans {s} a{i} {t1} 1/2")
                lines.append(f"trans {s} a{i} {t2} 1/2")
    return parse_mdp("\n".join(lines) + "\n")
