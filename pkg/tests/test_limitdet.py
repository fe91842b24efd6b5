"""Tests for limit-deterministic and good-for-MDP constructions."""

import random

import pytest

from tela import (
    Tela,
    TelaError,
    accepts,
    and_,
    build_gfm,
    build_ld,
    breakpoint_component,
    canonical_partition,
    fin_,
    inf_,
    is_deterministic,
    is_limit_deterministic,
    is_syntactically_limit_deterministic,
    limit_det_sum,
    sample_lassos,
)
from tela.acceptance import dnf_structure, to_dnf
from tela.determinize import determinize_product, equivalent_deterministic
from tela.limitdet import GFM_STATE_LIMIT, _breakpoint_explore, limit_det_violation
from tela.transforms import ensure_dnf

from helpers import example_automaton, random_automaton
from oracles import oracle_accepts, random_word


def universal_buchi():
    return Tela(
        ap=("a",),
        n_states=1,
        initial=frozenset({0}),
        transitions=((0, 0, 0, 1), (0, 1, 0, 1)),
        acceptance=inf_(1),
        n_marks=1,
    )


def nondet_accepting_loop():
    """State 0 guesses between a marked self-loop and a rejecting sink."""
    return Tela(
        ap=("a",),
        n_states=2,
        initial=frozenset({0}),
        transitions=(
            (0, 0, 0, 1),
            (0, 0, 1, 0),
            (0, 1, 0, 1),
            (1, 0, 1, 0),
            (1, 1, 1, 0),
        ),
        acceptance=inf_(1),
        n_marks=1,
    )


def random_dnf_automaton(rng, **kw):
    return ensure_dnf(random_automaton(rng, dnf_only=True, **kw))


def test_canonical_partition_deterministic_input():
    q_n, q_d = canonical_partition(universal_buchi())
    assert q_n == frozenset()
    assert q_d == frozenset({0})


def test_canonical_partition_closure_under_predecessors():
    a = nondet_accepting_loop()
    q_n, q_d = canonical_partition(a)
    assert q_n == frozenset({0})
    assert q_d == frozenset({1})
    rng = random.Random(450)
    for _ in range(30):
        b = random_automaton(rng, n_marks=2, ap=("a",))
        q_n, q_d = canonical_partition(b)
        assert q_n | q_d == frozenset(range(b.n_states))
        assert not q_n & q_d
        # No transition may leave the deterministic part.
        for s, _, d, _ in b.transitions:
            if s in q_d:
                assert d in q_d


def test_limit_det_violation_witness():
    a = nondet_accepting_loop()
    lasso = limit_det_violation(a)
    assert lasso is not None
    assert not is_limit_deterministic(a)
    q_n, _ = canonical_partition(a)
    for s, _, d, _ in (*lasso.prefix, *lasso.cycle):
        assert s in q_n and d in q_n
    assert lasso.cycle_marks() & 1
    u, v = lasso.word()
    assert accepts(a, u, v)


def test_limit_deterministic_basics():
    assert is_limit_deterministic(universal_buchi())
    # Nondeterminism that only feeds the deterministic part is fine.
    ok = Tela(
        ap=("a",),
        n_states=2,
        initial=frozenset({0}),
        transitions=(
            (0, 0, 0, 0),
            (0, 0, 1, 0),
            (0, 1, 0, 0),
            (1, 0, 1, 1),
            (1, 1, 1, 1),
        ),
        acceptance=inf_(1),
        n_marks=1,
    )
    assert is_limit_deterministic(ok)
    assert is_syntactically_limit_deterministic(ok)
    assert not is_syntactically_limit_deterministic(nondet_accepting_loop())


def test_syntactic_check_implies_semantic():
    rng = random.Random(451)
    for _ in range(40):
        a = random_dnf_automaton(rng, n_marks=3, ap=("a",))
        if is_syntactically_limit_deterministic(a):
            assert is_limit_deterministic(a)


def test_breakpoint_explore_invariants():
    rng = random.Random(452)
    for _ in range(25):
        a = random_dnf_automaton(rng, n_marks=3, ap=("a",))
        dnf = dnf_structure(a.acceptance)
        seeds = [frozenset({q}) for q in range(a.n_states)]
        for disjunct in dnf.disjuncts:
            k = len(disjunct.infs)
            order, trans = _breakpoint_explore(a, disjunct.fin, disjunct.infs, seeds)
            for r, b, level in order:
                assert r
                assert b <= r
                assert 0 <= level <= k
            for si, _, di, brk in trans:
                src_level = order[si][2]
                r2, b2, dst_level = order[di]
                if brk:
                    assert b2 == frozenset()
                    assert dst_level == (src_level + 1) % (k + 1)
                else:
                    assert dst_level == src_level
                    assert b2 != r2


def test_breakpoint_component_universal_loop():
    bc = breakpoint_component(universal_buchi(), 0)
    assert bc.n_states == 2
    assert bc.initial == frozenset({0})
    assert is_deterministic(bc)
    assert accepts(bc, (), (1,))
    assert accepts(bc, (), (0, 1))
    with pytest.raises(TelaError):
        breakpoint_component(universal_buchi(), 1)


def test_breakpoint_component_is_deterministic():
    rng = random.Random(453)
    for _ in range(20):
        a = random_dnf_automaton(rng, n_marks=3, ap=("a",))
        bc = breakpoint_component(a, 0)
        assert is_deterministic(bc)
        assert bc.acceptance == inf_(1)


def test_build_ld_layout_on_the_eight_state_example():
    ex = example_automaton()
    ld = build_ld(ex)
    assert ld.n_states == 24
    assert ld.initial == ex.initial
    assert ld.acceptance == inf_(1)
    assert ld.n_marks == 1
    # The input sits unmarked in front; marks live inside the components and
    # no component transition returns to the input part.
    n = ex.n_states
    for s, _, d, marks in ld.transitions:
        if marks:
            assert s >= n
        if s >= n:
            assert d >= n
    assert is_syntactically_limit_deterministic(ld)
    assert is_limit_deterministic(ld)


def test_build_ld_trap_after_wrong_guess():
    # Entering the component right after the first letter commits to the
    # current breakpoint set; from {a1 b1} the sets for both b-letters
    # include only b1 successors, so the letter b2 has no continuation.
    ex = example_automaton()
    ld = build_ld(ex)
    bridge = ld.succ(8, 0)
    assert len(bridge) == 1
    s_star = bridge[0][2]
    assert s_star >= ex.n_states
    assert ld.succ(s_star, 3) == ()
    assert ld.succ(s_star, 2) != ()


def test_build_ld_preserves_language():
    rng = random.Random(454)
    for _ in range(20):
        a = random_dnf_automaton(rng, n_marks=3, ap=("a",))
        ld = build_ld(a)
        assert is_syntactically_limit_deterministic(ld)
        for u, v in sample_lassos(a, 10, seed=rng.randrange(10**6)):
            assert accepts(ld, u, v) == oracle_accepts(a, u, v)


def test_build_gfm_shape_on_the_eight_state_example():
    ex = example_automaton()
    g = build_gfm(ex)
    gs = build_gfm(ex, singleton_bridges=True)
    assert g.initial == frozenset({0})
    assert g.acceptance == inf_(1)
    # From the initial subset on the first letter: one subset move plus one
    # bridge per nonempty subset of the four successors, or per singleton.
    assert len(g.succ(0, 0)) == 16
    assert len(gs.succ(0, 0)) == 5
    assert gs.n_states < g.n_states
    assert is_syntactically_limit_deterministic(g)
    assert is_syntactically_limit_deterministic(gs)


def test_build_gfm_preserves_language():
    rng = random.Random(455)
    for _ in range(15):
        a = random_dnf_automaton(rng, max_states=3, n_marks=3, ap=("a",))
        g = build_gfm(a)
        gs = build_gfm(a, singleton_bridges=True)
        for u, v in sample_lassos(a, 10, seed=rng.randrange(10**6)):
            expected = oracle_accepts(a, u, v)
            assert accepts(g, u, v) == expected
            assert accepts(gs, u, v) == expected


def test_build_gfm_refuses_large_inputs():
    big = Tela(
        ap=("a",),
        n_states=GFM_STATE_LIMIT + 1,
        initial=frozenset({0}),
        transitions=tuple(
            (q, 0, (q + 1) % (GFM_STATE_LIMIT + 1), 1)
            for q in range(GFM_STATE_LIMIT + 1)
        ),
        acceptance=inf_(1),
        n_marks=1,
    )
    with pytest.raises(TelaError):
        build_gfm(big)


def test_constructions_agree_on_deterministic_buchi():
    rng = random.Random(456)
    for _ in range(10):
        a = random_automaton(rng, max_states=3, n_marks=1, ap=("a",)).with_acceptance(
            inf_(1), 1
        )
        ld = build_ld(a)
        g = build_gfm(a)
        for _ in range(10):
            u, v = random_word(rng, 2)
            expected = accepts(a, u, v)
            assert accepts(ld, u, v) == expected
            assert accepts(g, u, v) == expected


def test_limit_det_sum_single_disjunct_is_deterministic():
    a = universal_buchi().with_acceptance(and_([fin_(1), inf_(1)]), 1)
    # One DNF disjunct means no sum at all, just one determinized part.
    out = limit_det_sum(ensure_dnf(a))
    assert is_deterministic(out)
    assert is_limit_deterministic(out)


def test_limit_det_sum_properties():
    rng = random.Random(457)
    for _ in range(10):
        a = random_automaton(rng, max_states=3, n_marks=2, ap=("a",))
        out = limit_det_sum(a)
        assert is_limit_deterministic(out)
        assert limit_det_violation(out) is None
        for u, v in sample_lassos(a, 8, seed=rng.randrange(10**6)):
            assert accepts(out, u, v) == accepts(a, u, v)


def test_limit_det_sum_matches_determinization():
    rng = random.Random(458)
    done = 0
    while done < 5:
        a = random_automaton(rng, max_states=3, n_marks=2, ap=("a",))
        out = limit_det_sum(a)
        det = determinize_product(a, state_cap=300)
        done += 1
        for _ in range(10):
            u, v = random_word(rng, 2)
            assert accepts(out, u, v) == accepts(det, u, v)


def test_gfm_nondeterministic_part_is_the_subset_part():
    ex = example_automaton()
    g = build_gfm(ex)
    # Recount the reachable subset states independently.
    subsets = {frozenset(ex.initial)}
    frontier = [frozenset(ex.initial)]
    while frontier:
        p = frontier.pop()
        for letter in range(ex.n_letters):
            theta = frozenset(d for q in p for _, _, d, _ in ex.succ(q, letter))
            if theta and theta not in subsets:
                subsets.add(theta)
                frontier.append(theta)
    q_n, _ = canonical_partition(g)
    assert q_n <= frozenset(range(len(subsets)))
