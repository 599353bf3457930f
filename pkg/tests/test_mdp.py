import random
from fractions import Fraction

import pytest

from resolvability.errors import InputError
from resolvability.games import ADAM, EVE, Edge, GameArena, Muller
from resolvability.mdp import (
    Mdp,
    almost_sure_muller,
    almost_sure_muller_verdict,
    almost_sure_reach,
    mdp_from_arena,
    mec_decomposition,
    positive_muller,
    random_strategy_step,
)
from resolvability.zielonka import zielonka_dag

from generators import random_family, random_mdp, reweight
from oracles import (
    _bsccs,
    almost_sure_reach_oracle,
    chain_reach_probability,
    mec_oracle,
    muller_ec_oracle,
    muller_randomized_oracle,
)


def instance(seed, n=None, ncol=3):
    rng = random.Random(seed)
    m = random_mdp(rng, n or rng.randint(1, 5), ncol)
    colors = sorted(m.colors) or [0]
    fam = random_family(rng, colors)
    return rng, m, zielonka_dag(colors, fam), (lambda s: s in fam)


def test_probabilities_must_sum_to_one():
    with pytest.raises(InputError, match="sum to"):
        Mdp(vertices=[0, 1], controlled=[], edges=[Edge(0, 1, 0), Edge(0, 0, 1), Edge(1, 1, 0)],
            prob={Edge(0, 1, 0): Fraction(1, 2), Edge(0, 0, 1): Fraction(1, 3), Edge(1, 1, 0): 1})


def test_blank_cycles_rejected():
    with pytest.raises(InputError, match="blank"):
        Mdp(vertices=[0], controlled=[0], edges=[Edge(0, 0)])


def test_dag_must_cover_colours():
    m = Mdp(vertices=[0], controlled=[0], edges=[Edge(0, 0, 5)])
    with pytest.raises(InputError, match="colour"):
        almost_sure_muller(m, zielonka_dag([0, 1], [{0}]))


@pytest.mark.parametrize("seed", range(40))
def test_mecs_match_enumeration(seed):
    _, m, _, _ = instance(seed)
    assert set(mec_decomposition(m)) == mec_oracle(m)


@pytest.mark.parametrize("seed", range(40))
def test_almost_sure_reach_matches_oracle(seed):
    rng, m, _, _ = instance(100 + seed)
    target = {v for v in m.vertices if rng.random() < 0.3}
    assert almost_sure_reach(m, target) == almost_sure_reach_oracle(m, target)


@pytest.mark.parametrize("seed", range(60))
def test_muller_matches_end_component_oracle(seed):
    _, m, z, acc = instance(200 + seed)
    assert almost_sure_muller(m, z) == muller_ec_oracle(m, acc)


@pytest.mark.parametrize("seed", range(40))
def test_positive_matches_randomised_oracle(seed):
    _, m, z, acc = instance(300 + seed, n=4)
    a_s, pos = muller_randomized_oracle(m, acc)
    assert almost_sure_muller(m, z) == a_s
    assert positive_muller(m, z) == pos


@pytest.mark.parametrize("seed", range(30))
def test_reweighting_keeps_qualitative_sets(seed):
    rng, m, z, _ = instance(400 + seed)
    m2 = reweight(rng, m)
    assert almost_sure_muller(m, z) == almost_sure_muller(m2, z)
    assert positive_muller(m, z) == positive_muller(m2, z)


@pytest.mark.parametrize("seed", range(30))
def test_tie_order_is_irrelevant(seed):
    _, m, z, _ = instance(500 + seed)
    assert almost_sure_muller(m, z) == almost_sure_muller(m, z, reverse_ties=True)


@pytest.mark.parametrize("seed", range(40))
def test_returned_strategy_wins_almost_surely(seed):
    """Playing uniformly over the returned supports reaches accepting bottom SCCs surely."""
    _, m, z, acc = instance(600 + seed)
    v = almost_sure_muller_verdict(m, z)
    if not v.almost_sure:
        return
    trans, used = {}, []
    for u in m.vertices:
        if u in m.controlled:
            es = v.strategy.get(u) or m.out(u)
            trans[u] = [(e.dst, Fraction(1, len(es))) for e in es]
        else:
            es = m.out(u)
            trans[u] = [(e.dst, m.prob[e]) for e in es]
        used += es
    succ = {u: {w for w, _ in trans[u]} for u in m.vertices}
    good = set()
    for comp in _bsccs(m.vertices, succ):
        cols = {e.color for e in used if e.src in comp and e.dst in comp and e.color is not None}
        if cols and acc(frozenset(cols)):
            good |= comp
    pr = chain_reach_probability(m.vertices, trans, good)
    assert all(pr[u] == 1 for u in v.almost_sure)


def test_arena_conversion_uniform():
    g = GameArena(vertices=(0, 1), owner={0: EVE, 1: ADAM},
                  edges=(Edge(0, 1, 0), Edge(0, 0, 1), Edge(1, 0, 2)), initial=0,
                  objective=Muller(zielonka_dag([0, 1, 2], [{2, 0}])))
    m = mdp_from_arena(g, EVE)
    assert m.controlled == {1}
    assert m.prob[Edge(0, 1, 0)] == Fraction(1, 2)


def test_random_step_follows_support():
    m = Mdp(vertices=[0, 1], controlled=[0, 1], edges=[Edge(0, 0, 1), Edge(0, 1, 0), Edge(1, 1, 0)])
    rng = random.Random(0)
    assert {random_strategy_step(rng, m, {0: [Edge(0, 1, 0)]}, 0) for _ in range(20)} == {Edge(0, 1, 0)}
