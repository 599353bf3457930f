"""Random instance generators shared by the test-suite."""

from __future__ import annotations

import itertools
from fractions import Fraction

from resolvability.automata import LassoWord, ParityAutomaton, Transition
from resolvability.gadgets import TwoDimParityGame
from resolvability.errors import InputError
from resolvability.games import ADAM, EVE, Edge
from resolvability.mdp import Mdp


def random_automaton(rng, n=3, alphabet=("a", "b"), bounds=(1, 2), max_branch=2, deterministic=False):
    states = [f"q{i}" for i in range(n)]
    lo, hi = bounds
    ts = []
    for q in states:
        for x in alphabet:
            k = 1 if deterministic else rng.randint(1, max_branch)
            for _ in range(k):
                ts.append(Transition(q, x, rng.randint(lo, hi), rng.choice(states)))
    return ParityAutomaton(states=states, alphabet=alphabet, initial="q0", transitions=ts, bounds=bounds)


def random_lasso(rng, alphabet=("a", "b"), max_prefix=2, max_period=3):
    pre = tuple(rng.choice(alphabet) for _ in range(rng.randint(0, max_prefix)))
    per = tuple(rng.choice(alphabet) for _ in range(rng.randint(1, max_period)))
    return LassoWord(pre, per)


def all_lassos(alphabet, max_total):
    for total in range(1, max_total + 1):
        for plen in range(total):
            for pre in itertools.product(alphabet, repeat=plen):
                for per in itertools.product(alphabet, repeat=total - plen):
                    yield LassoWord(pre, per)


def random_mdp(rng, n, ncol, p_controlled=0.5):
    """Blank edges only go to larger vertex numbers, so no blank cycle exists."""
    ctrl = {v for v in range(n) if rng.random() < p_controlled}
    edges, prob = [], {}
    for v in range(n):
        es = set()
        for _ in range(rng.randint(1, 3)):
            dst = rng.randrange(n)
            c = rng.randrange(ncol) if rng.random() < 0.85 else None
            if c is None and dst <= v:
                c = 0
            es.add(Edge(v, dst, c))
        es = sorted(es, key=repr)
        if v not in ctrl:
            ws = [rng.randint(1, 3) for _ in es]
            for e, w in zip(es, ws):
                prob[e] = Fraction(w, sum(ws))
        edges += es
    return Mdp(vertices=range(n), controlled=ctrl, edges=edges, prob=prob)


def random_family(rng, colors):
    fam = set()
    for r in range(1, len(colors) + 1):
        for s in itertools.combinations(colors, r):
            if rng.random() < 0.5:
                fam.add(frozenset(s))
    return fam


def reweight(rng, m):
    """Same supports, fresh positive probabilities."""
    prob = {}
    for v in m.vertices:
        if v in m.controlled:
            continue
        out = m.out(v)
        ws = [rng.randint(1, 9) for _ in out]
        for e, w in zip(out, ws):
            prob[e] = Fraction(w, sum(ws))
    return m.with_probabilities(prob)


def random_game(rng, n, prios=(0, 1, 2, 3)):
    owner = {v: rng.choice([EVE, ADAM]) for v in range(n)}
    edges = []
    for v in range(n):
        for _ in range(rng.randint(1, 3)):
            edges.append(Edge(v, rng.randrange(n), rng.choice(prios)))
    return owner, edges


def random_good_2d_game(rng, max_vertices=4):
    """A good 2-D game accepted by the hardness reduction, or None."""
    k = rng.randint(1, max_vertices)
    vs = [f"v{i}" for i in range(k)]
    owner = {v: rng.choice([EVE, EVE, ADAM]) for v in vs}
    edges = []
    for v in vs:
        for _ in range(2 if owner[v] == EVE else rng.randint(1, 2)):
            edges.append((f"e{len(edges)}", v, rng.choice(vs), rng.choice([0, 1, 2, 2]), rng.choice([0, 1, 1, 2])))
    try:
        g = TwoDimParityGame(vs, owner, edges, vs[0])
    except InputError:
        return None
    return g if g.d_included_in_h() else None
