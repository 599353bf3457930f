import random
import time

import pytest
from hypothesis import given, settings, strategies as st

from resolvability.errors import InputError
from resolvability.gallery import fig1a, fig1b, fig3, fig4, fig5, fig6, fig7, parity_lang
from resolvability.games import (
    ADAM,
    EVE,
    Edge,
    GameArena,
    Muller,
    build_simulation_game,
    build_two_token_game,
    is_history_deterministic,
    simulation_eve_wins,
    solve_game,
    solve_muller_game,
    solve_parity_game,
    solve_simulation,
    two_token_eve_wins,
)
from resolvability.lang import lasso_membership
from resolvability.zielonka import parity_family, zielonka_dag

from generators import all_lassos, random_automaton, random_family, random_game
from oracles import mcnaughton, parity_bruteforce


def arena(owner, edges, objective=None):
    kw = {} if objective is None else {"objective": objective}
    return GameArena(vertices=tuple(owner), owner=owner, edges=tuple(edges), initial=0, **kw)


def test_arena_rejects_dead_ends_and_blank_cycles():
    with pytest.raises(InputError, match="no outgoing"):
        arena({0: EVE, 1: ADAM}, [Edge(0, 1, 0)])
    with pytest.raises(InputError, match="blank"):
        arena({0: EVE, 1: ADAM}, [Edge(0, 1), Edge(1, 0)])
    with pytest.raises(InputError, match="owner"):
        arena({0: "nobody"}, [Edge(0, 0, 1)])


def test_self_loop_games():
    g = arena({0: ADAM}, [Edge(0, 0, 2)])
    assert solve_parity_game(g).win_eve == {0}
    g = arena({0: EVE}, [Edge(0, 0, 3)])
    assert solve_parity_game(g).win_adam == {0}


def _check_positional(g, res):
    """Fixing Eve's strategy, brute force must still give her every vertex she was promised."""
    edges = [e for e in g.edges if g.owner[e.src] == ADAM or e.src not in res.win_eve
             or res.strategy_eve[e.src] == e]
    restricted = arena(dict(g.owner), edges)
    assert res.win_eve <= parity_bruteforce(restricted)


@pytest.mark.parametrize("seed", range(60))
def test_parity_solver_matches_bruteforce(seed):
    rng = random.Random(seed)
    owner, edges = random_game(rng, rng.randint(1, 5))
    g = arena(owner, edges)
    res = solve_parity_game(g)
    assert res.win_eve | res.win_adam == set(g.vertices)
    assert not res.win_eve & res.win_adam
    assert res.win_eve == parity_bruteforce(g)
    for v in res.win_eve:
        if g.owner[v] == EVE:
            assert res.strategy_eve[v].dst in res.win_eve
    _check_positional(g, res)


@pytest.mark.parametrize("seed", range(60))
def test_muller_solver_matches_mcnaughton(seed):
    rng = random.Random(1000 + seed)
    owner, edges = random_game(rng, rng.randint(1, 5))
    colors = sorted({e.color for e in edges})
    fam = random_family(rng, colors)
    g = arena(owner, edges, Muller(zielonka_dag(colors, fam)))
    res = solve_muller_game(g)
    we, wa = mcnaughton(g, lambda s: s in fam)
    assert res.win_eve == we
    assert res.win_adam == wa
    _check_memory_strategy(g, res, lambda s: s in fam)


def _check_memory_strategy(g, res, accepting):
    """Eve's finite-memory strategy, unfolded into an Adam-only arena, must still win."""
    strat = res.strategy_eve
    for v0 in res.win_eve:
        start = (v0, strat.initial)
        owner, edges, todo = {start: ADAM}, [], [start]
        while todo:
            v, m = todo.pop()
            outs = g.out(v) if g.owner[v] == ADAM else [strat.moves[(v, m)]]
            for e in outs:
                m2 = m if e.color is None else strat.update[(m, e.color)]
                dst = (e.dst, m2)
                edges.append(Edge((v, m), dst, e.color))
                if dst not in owner:
                    owner[dst] = ADAM
                    todo.append(dst)
        unfolded = GameArena(vertices=tuple(owner), owner=owner, edges=tuple(edges), initial=start,
                             objective=g.objective)
        win, _ = mcnaughton(unfolded, accepting)
        assert start in win


@pytest.mark.parametrize("seed", range(25))
def test_parity_as_muller(seed):
    rng = random.Random(2000 + seed)
    owner, edges = random_game(rng, rng.randint(1, 5))
    colors = sorted({e.color for e in edges})
    par = solve_parity_game(arena(owner, edges))
    mul = solve_game(arena(owner, edges, Muller(zielonka_dag(colors, parity_family(colors)))))
    assert par.win_eve == mul.win_eve


def test_condition_tables():
    assert two_token_eve_wins((2, 1, 1))
    assert two_token_eve_wins((1, 1, 3))
    assert not two_token_eve_wins((1, 2, 1))
    assert simulation_eve_wins((1, 1))
    assert simulation_eve_wins((2, 0))
    assert not simulation_eve_wins((2, 1))


HD_EXPECTED = [
    (fig1a, False),
    (fig1b, True),
    (fig3, False),
    (fig4, True),
    (fig5, False),
    (fig6, False),
    (lambda: fig7(2), False),
    (lambda: parity_lang([1, 2]), True),
    (lambda: parity_lang([0, 3]), True),
]


@pytest.mark.parametrize("make, expected", HD_EXPECTED)
def test_history_determinism_on_gallery(make, expected):
    assert bool(is_history_deterministic(make())) is expected


def test_deterministic_automata_are_hd():
    rng = random.Random(7)
    for _ in range(10):
        d = random_automaton(rng, n=3, bounds=(0, 3), deterministic=True)
        assert is_history_deterministic(d)


def test_two_token_arena_shape():
    g = build_two_token_game(fig3(), fig3())
    assert g.initial == ("R", "q0", "q0", "q0")
    assert all(len(c) == 3 for c in g.colors())


def test_simulation_is_reflexive():
    for a in (fig1a(), fig3(), fig4()):
        assert solve_simulation(a, a)


@pytest.mark.parametrize("seed", range(30))
def test_simulation_implies_containment(seed):
    rng = random.Random(3000 + seed)
    bounds = rng.choice([(1, 2), (0, 1), (0, 2)])
    a = random_automaton(rng, n=2, bounds=bounds)
    b = random_automaton(rng, n=2, bounds=bounds)
    if solve_simulation(a, b):
        for w in all_lassos(a.alphabet, 4):
            assert not lasso_membership(a, w) or lasso_membership(b, w)


def test_simulation_arena_alphabet_check():
    other = parity_lang([1, 2])
    with pytest.raises(InputError, match="alphabet"):
        build_simulation_game(fig3(), other)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_deterministic_automaton_simulates_itself(seed):
    d = random_automaton(random.Random(seed), n=3, bounds=(0, 2), deterministic=True)
    t0 = time.perf_counter()
    assert solve_simulation(d, d)
    assert time.perf_counter() - t0 < 5
