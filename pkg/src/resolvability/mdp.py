"""Qualitative analysis of MDPs with Muller objectives.

The controller owns the controlled vertices and wants the Muller condition
given by a Zielonka DAG.  Edge colours of ``None`` are blank, as in arenas.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Iterable, Optional

from .automata import canon_key, sorted_canon
from .errors import Budget, InputError, budget_for
from .games import Edge, edge_key
from .graphs import tarjan_scc
from .zielonka import ZielonkaDag, validate_dag


@dataclass(frozen=True)
class Mdp:
    vertices: tuple
    controlled: frozenset
    edges: tuple
    prob: dict = field(default_factory=dict)
    colors: Optional[frozenset] = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted_canon(self.vertices)))
        object.__setattr__(self, "controlled", frozenset(self.controlled))
        edges = tuple(sorted({Edge(*e) for e in self.edges}, key=edge_key))
        object.__setattr__(self, "edges", edges)
        prob = {Edge(*e): Fraction(p) for e, p in self.prob.items()}
        object.__setattr__(self, "prob", prob)
        used = frozenset(e.color for e in edges if e.color is not None)
        if self.colors is None:
            object.__setattr__(self, "colors", used)
        else:
            object.__setattr__(self, "colors", frozenset(self.colors))
            if not used <= self.colors:
                raise InputError("edge colours outside the declared colour set")
        vs = set(self.vertices)
        out: dict = {v: [] for v in self.vertices}
        for e in edges:
            if e.src not in vs or e.dst not in vs:
                raise InputError(f"edge {e!r} leaves the vertex set")
            out[e.src].append(e)
        object.__setattr__(self, "_out", out)
        for v in self.vertices:
            if not out[v]:
                raise InputError(f"vertex {v!r} has no outgoing edge")
            if v in self.controlled:
                continue
            total = Fraction(0)
            for e in out[v]:
                p = prob.get(e)
                if p is None or p <= 0:
                    raise InputError(f"stochastic edge {e!r} needs a positive probability")
                total += p
            if total != 1:
                raise InputError(f"probabilities out of {v!r} sum to {total}, not 1")
        blank = {v: [e.dst for e in out[v] if e.color is None] for v in self.vertices}
        for comp in tarjan_scc(self.vertices, blank):
            if len(comp) > 1 or comp[0] in blank[comp[0]]:
                raise InputError("a cycle of blank edges exists")

    def out(self, v) -> list:
        return self._out[v]

    def with_probabilities(self, prob: dict) -> "Mdp":
        return Mdp(vertices=self.vertices, controlled=self.controlled, edges=self.edges,
                   prob=prob, colors=self.colors)


@dataclass(frozen=True)
class SubMdp:
    """A vertex set together with the surviving edges out of each vertex."""

    vertices: frozenset
    out: dict

    def edges(self) -> list:
        return [e for v in self.vertices for e in self.out[v]]


def whole(m: Mdp) -> SubMdp:
    return SubMdp(frozenset(m.vertices), {v: list(m.out(v)) for v in m.vertices})


def _prune(m: Mdp, verts: set, out: dict, keep_edge) -> SubMdp:
    """Largest sub-MDP where kept edges stay inside and stochastic vertices keep all edges."""
    verts = set(verts)
    cur = {v: [e for e in out[v] if keep_edge(e)] for v in verts}
    full = {v: len(out[v]) for v in verts}
    changed = True
    while changed:
        changed = False
        for v in sorted_canon(verts):
            es = [e for e in cur[v] if e.dst in verts]
            if v in m.controlled:
                dead = not es
            else:
                dead = len(es) != full[v]
            cur[v] = es
            if dead:
                verts.discard(v)
                changed = True
    return SubMdp(frozenset(verts), {v: cur[v] for v in verts})


def restrict_to_colors(m: Mdp, X: Iterable, sub: Optional[SubMdp] = None) -> SubMdp:
    """M|_X: the controller can keep every colour seen inside X surely."""
    X = frozenset(X)
    sub = sub or whole(m)
    return _prune(m, sub.vertices, sub.out, lambda e: e.color is None or e.color in X)


def mec_decomposition(m: Mdp, sub: Optional[SubMdp] = None) -> list[frozenset]:
    """Maximal end components of ``sub`` (default: the whole MDP).

    Alternates two prunings until stable: drop vertices that cannot stay
    (controlled without an edge, stochastic with a lost edge) and drop edges
    between different SCCs.
    """
    sub = sub or whole(m)
    full = {v: len(sub.out[v]) for v in sub.vertices}
    verts = set(sub.vertices)
    cur = {v: list(sub.out[v]) for v in verts}
    while True:
        changed = True
        while changed:
            changed = False
            for v in sorted_canon(verts):
                cur[v] = [e for e in cur[v] if e.dst in verts]
                if (not cur[v]) if v in m.controlled else len(cur[v]) != full[v]:
                    verts.discard(v)
                    changed = True
        comps = tarjan_scc(sorted_canon(verts), {v: [e.dst for e in cur[v]] for v in verts})
        comp_of = {v: i for i, c in enumerate(comps) for v in c}
        split = False
        for v in verts:
            inside = [e for e in cur[v] if comp_of[e.dst] == comp_of[v]]
            if len(inside) != len(cur[v]):
                cur[v] = inside
                split = True
        if not split:
            break
    return sorted((frozenset(c) for c in comps), key=lambda c: sorted(canon_key(v) for v in c))


def _internal_edges(sub: SubMdp, comp: frozenset) -> list:
    return [e for v in comp for e in sub.out[v] if e.dst in comp]


def almost_sure_reach(
    m: Mdp, target: Iterable, sub: Optional[SubMdp] = None, strategy: Optional[dict] = None,
) -> frozenset:
    """Vertices from which the controller reaches ``target`` with probability 1.

    Greatest fixpoint over W of the vertices that reach the target with
    positive probability while never being forced out of W.  If
    ``strategy`` is given, controlled vertices newly decided get the edge
    that decreases their distance to the target.
    """
    sub = sub or whole(m)
    T = set(target) & set(sub.vertices)
    W = set(sub.vertices)
    pred: dict = {}
    for v in sub.vertices:
        for e in sub.out[v]:
            pred.setdefault(e.dst, []).append(e)
    while True:
        R = set(T)
        via: dict = {}
        todo = deque(sorted_canon(T))
        while todo:
            w = todo.popleft()
            for e in pred.get(w, ()):
                u = e.src
                if u in R or u not in W:
                    continue
                if u in m.controlled:
                    ok = True
                else:
                    ok = all(f.dst in W for f in sub.out[u])
                if ok:
                    R.add(u)
                    via[u] = e
                    todo.append(u)
        if R == W:
            if strategy is not None:
                for u, e in via.items():
                    if u in m.controlled and u not in strategy:
                        strategy[u] = [e]
            return frozenset(W)
        W = R


@dataclass(frozen=True)
class MullerWinVerdict:
    almost_sure: frozenset
    positive: frozenset
    strategy: dict


def _check_colors(m: Mdp, z: ZielonkaDag) -> None:
    validate_dag(z)
    if not m.colors <= z.colors:
        raise InputError("MDP colours are not contained in the DAG's colour set")


def almost_sure_muller_verdict(
    m: Mdp, z: ZielonkaDag, reverse_ties: bool = False, budget: Optional[Budget] = None,
) -> MullerWinVerdict:
    """Bottom-up pass over the Zielonka DAG collecting winning end components.

    For each accepting node X (children first) the MDP is restricted to
    M|_X; every MEC of that restriction whose colours escape all children
    of X is added to Win, which is then closed under almost-sure reach.
    """
    _check_colors(m, z)
    budget = budget or budget_for()
    win: frozenset = frozenset()
    strategy: dict = {}
    full = whole(m)
    for node in z.reverse_topological(reverse_ties):
        if not z.accepting[node]:
            continue
        X = z.labels[node]
        kids = [z.labels[c] for c in z.children[node]]
        sub = restrict_to_colors(m, X)
        budget.charge(len(sub.vertices) + 1, "MDP vertices")
        for comp in mec_decomposition(m, sub):
            inner = _internal_edges(sub, comp)
            col = frozenset(e.color for e in inner if e.color is not None)
            if col and all(not col <= Y for Y in kids):
                for v in comp:
                    if v in m.controlled and v not in strategy:
                        strategy[v] = sorted((e for e in inner if e.src == v), key=edge_key)
                win = almost_sure_reach(m, win | comp, full, strategy)
    pos = positive_from(m, win)
    return MullerWinVerdict(win, pos, {v: strategy[v] for v in win if v in strategy})


def almost_sure_muller(m: Mdp, z: ZielonkaDag, reverse_ties: bool = False) -> frozenset:
    return almost_sure_muller_verdict(m, z, reverse_ties).almost_sure


def positive_from(m: Mdp, win: Iterable) -> frozenset:
    """Vertices with a path into ``win``."""
    seen = set(win)
    pred: dict = {}
    for e in m.edges:
        pred.setdefault(e.dst, []).append(e.src)
    todo = deque(seen)
    while todo:
        w = todo.popleft()
        for u in pred.get(w, ()):
            if u not in seen:
                seen.add(u)
                todo.append(u)
    return frozenset(seen)


def positive_muller(m: Mdp, z: ZielonkaDag) -> frozenset:
    return positive_from(m, almost_sure_muller(m, z))


def mdp_from_arena(g, stochastic_owner: str) -> Mdp:
    """Turn a game arena into an MDP: one player's vertices move uniformly."""
    controlled = [v for v in g.vertices if g.owner[v] != stochastic_owner]
    prob = {}
    for v in g.vertices:
        if g.owner[v] == stochastic_owner:
            out = g.out(v)
            for e in out:
                prob[e] = Fraction(1, len(out))
    return Mdp(vertices=g.vertices, controlled=controlled, edges=g.edges, prob=prob)


def random_strategy_step(rng, m: Mdp, strategy: dict, v: Hashable) -> Edge:
    """One step of play: strategy support for controlled vertices, delta otherwise."""
    if v in m.controlled:
        return rng.choice(strategy.get(v) or m.out(v))
    out = m.out(v)
    r = Fraction(rng.random())
    acc = Fraction(0)
    for e in out:
        acc += m.prob[e]
        if r < acc:
            return e
    return out[-1]
