"""Reduction gadgets: 2-D parity games, PFAs and probabilistic Büchi automata."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, NamedTuple, Optional

from .automata import (
    ParityAutomaton,
    ProbabilisticParityAutomaton,
    Resolver,
    Transition,
    complete_with_sink,
    fresh_name,
    sorted_canon,
)
from .errors import InputError
from .games import ADAM, EVE, Edge, GameArena, Muller, solve_muller_game
from .zielonka import max_vector_predicate, zielonka_dag


class TwoDimEdge(NamedTuple):
    name: str
    src: Hashable
    dst: Hashable
    first: int
    second: int


def two_dim_eve_wins(maxima: tuple) -> bool:
    """Eve wins a play unless it meets the first parity condition and fails the second."""
    f, s = maxima
    return f % 2 == 1 or s % 2 == 0


@dataclass(frozen=True)
class TwoDimParityGame:
    """A game whose edges carry two priorities (first, second).

    ``good`` asks for validation that no play satisfies the second parity
    condition while failing the first.
    """

    vertices: tuple
    owner: dict
    edges: tuple
    initial: Hashable
    good: bool = True

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted_canon(self.vertices)))
        edges = tuple(TwoDimEdge(*e) for e in self.edges)
        object.__setattr__(self, "edges", edges)
        names = [e.name for e in edges]
        if len(set(names)) != len(names):
            raise InputError("edge names must be unique")
        vs = set(self.vertices)
        for e in edges:
            if e.src not in vs or e.dst not in vs:
                raise InputError(f"edge {e.name} leaves the vertex set")
            if e.first < 0 or e.second < 0:
                raise InputError(f"edge {e.name} has a negative priority")
        for v in self.vertices:
            if self.owner.get(v) not in (EVE, ADAM):
                raise InputError(f"vertex {v!r} has no owner")
            if not any(e.src == v for e in edges):
                raise InputError(f"vertex {v!r} has no outgoing edge")
        if self.initial not in vs:
            raise InputError("initial vertex is not a vertex")
        if self.good and not self.is_good():
            raise InputError("game is not good: a play meets the second condition but not the first")

    def out(self, v) -> list:
        return [e for e in self.edges if e.src == v]

    def _arena(self, fn, owner) -> GameArena:
        pairs = {(e.first, e.second) for e in self.edges}
        dag = zielonka_dag(pairs, max_vector_predicate(fn), vector=True)
        return GameArena(
            vertices=self.vertices, owner={v: owner(v) for v in self.vertices},
            edges=[Edge(e.src, e.dst, (e.first, e.second)) for e in self.edges],
            initial=self.initial, objective=Muller(dag),
        )

    def is_good(self) -> bool:
        """No reachable play satisfies the second condition and fails the first."""
        g = self._arena(lambda m: not (m[1] % 2 == 0 and m[0] % 2 == 1), lambda v: ADAM)
        return self.initial in solve_muller_game(g).win_eve

    def d_included_in_h(self) -> bool:
        """No play avoiding branching Eve vertices meets the first condition and fails the second.

        At a branching Eve vertex H can guess a wrong edge and continue as D,
        so only plays that never pass one can separate L(D) from L(H).
        """
        branching = {v for v in self.vertices if self.owner[v] == EVE and len(self.out(v)) > 1}
        if self.initial in branching:
            return True
        exit_v = ("exit",)
        pairs = {(e.first, e.second) for e in self.edges} | {(0, 0)}
        dag = zielonka_dag(pairs, max_vector_predicate(lambda m: not (m[0] % 2 == 0 and m[1] % 2 == 1)), vector=True)
        kept = [v for v in self.vertices if v not in branching]
        edges = [Edge(e.src, exit_v if e.dst in branching else e.dst, (e.first, e.second))
                 for e in self.edges if e.src not in branching]
        edges.append(Edge(exit_v, exit_v, (0, 0)))
        g = GameArena(vertices=kept + [exit_v], owner={v: ADAM for v in kept + [exit_v]}, edges=edges,
                      initial=self.initial, objective=Muller(dag))
        return self.initial in solve_muller_game(g).win_eve

    def eve_wins(self) -> bool:
        g = self._arena(two_dim_eve_wins, lambda v: self.owner[v])
        return self.initial in solve_muller_game(g).win_eve


@dataclass(frozen=True)
class HardnessInstance:
    h: ParityAutomaton
    d: ParityAutomaton
    notes: tuple = ()


def build_hardness_instance(g: TwoDimParityGame) -> HardnessInstance:
    """Automaton H with deterministic part D; Eve wins g iff H is MA.

    The equivalence argument needs L(H) = L(D).  Goodness gives one
    inclusion; the other is checked by ``d_included_in_h`` and the game is
    rejected if it fails.

    Letters are edge names plus a separator.  D tracks the play with first
    priorities.  H tracks it with second priorities; at Eve vertices H
    guesses her edge on the separator, and replaying any other edge drops H
    into the D-state reached by D.
    """
    if not g.good:
        raise InputError("hardness instances need a good game")
    notes = []
    taken = {e.name for e in g.edges}
    sep = "$" if "$" not in taken else fresh_name("$", taken)
    if sep != "$":
        notes.append(f"separator renamed to {sep}")

    def d_entry(v):
        return f"{v}_$" if g.owner[v] == EVE else f"{v}_D"

    ts = []
    d_states = set()
    for v in g.vertices:
        out = g.out(v)
        if g.owner[v] == ADAM:
            d_states.add(f"{v}_D")
            for e in out:
                ts.append((f"{v}_D", e.name, e.first, d_entry(e.dst)))
                ts.append((f"{v}_H", e.name, e.second, f"{e.dst}_H"))
        else:
            d_states.update({f"{v}_$", f"{v}_D"})
            ts.append((f"{v}_$", sep, 0, f"{v}_D"))
            for e in out:
                ts.append((f"{v}_D", e.name, e.first, d_entry(e.dst)))
                mid = f"({v}_H,{e.name})"
                ts.append((f"{v}_H", sep, 0, mid))
                ts.append((mid, e.name, e.second, f"{e.dst}_H"))
                for e2 in out:
                    if e2.name != e.name:
                        ts.append((mid, e2.name, e2.second, d_entry(e2.dst)))
    alphabet = sorted(taken) + [sep]
    states = sorted({t[0] for t in ts} | {t[3] for t in ts})
    sink = fresh_name("sink", states)
    top = max([1] + [t[2] for t in ts])
    states, ts = complete_with_sink(states, alphabet, ts, sink=sink, priority=top if top % 2 else top + 1)
    hi = max(t.priority for t in ts)
    h = ParityAutomaton(
        states=states, alphabet=alphabet, initial=f"{g.initial}_H", transitions=ts,
        bounds=(0, hi), name="hardness-H",
    )
    d_ts = [t for t in h.transitions if t.src in d_states or t.src == sink]
    d = h.with_initial(d_entry(g.initial)).subautomaton(d_ts)
    if not d.is_deterministic():
        raise InputError("D-part is not deterministic")
    if not g.d_included_in_h():
        raise InputError("H and its D-part accept different languages; the reduction does not apply")
    return HardnessInstance(h, d.renamed("hardness-D"), tuple(notes))


# ---------------------------------------------------------------------------
# probabilistic finite automata


@dataclass(frozen=True)
class Pfa:
    states: tuple
    alphabet: tuple
    initial: Hashable
    accepting: frozenset
    prob: dict = field(default_factory=dict)  # (src, letter, dst) -> Fraction

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(sorted_canon(self.states)))
        object.__setattr__(self, "alphabet", tuple(sorted_canon(self.alphabet)))
        object.__setattr__(self, "accepting", frozenset(self.accepting))
        prob = {tuple(k): Fraction(v) for k, v in self.prob.items()}
        object.__setattr__(self, "prob", prob)
        sset = set(self.states)
        if self.initial not in sset or not self.accepting <= sset:
            raise InputError("initial or accepting states are not states")
        for (q, x, r), p in prob.items():
            if q not in sset or r not in sset or x not in self.alphabet:
                raise InputError(f"bad PFA transition {(q, x, r)}")
            if p < 0:
                raise InputError(f"negative probability on {(q, x, r)}")
        for q in self.states:
            for x in self.alphabet:
                total = sum((p for (s, y, _), p in prob.items() if s == q and y == x), Fraction(0))
                if total != 1:
                    raise InputError(f"probabilities from ({q!r}, {x!r}) sum to {total}, not 1")

    def accept_probability(self, word) -> Fraction:
        dist = {self.initial: Fraction(1)}
        for x in word:
            nxt: dict = {}
            for (q, y, r), p in self.prob.items():
                if y == x and q in dist and p:
                    nxt[r] = nxt.get(r, Fraction(0)) + dist[q] * p
            dist = nxt
        return sum((m for q, m in dist.items() if q in self.accepting), Fraction(0))


@dataclass(frozen=True)
class GadgetResult:
    automaton: ParityAutomaton
    resolver: Resolver
    notes: tuple = ()
    letters: dict = field(default_factory=dict)


def pfa_to_buchi(p: Pfa) -> GadgetResult:
    """Büchi automaton for blocks of positively-accepted words separated by $."""
    notes = []
    sep = "$" if "$" not in p.alphabet else fresh_name("$", p.alphabet)
    if sep != "$":
        notes.append(f"separator renamed to {sep}")
    ts, moves = [], {}
    for q in p.states:
        for x in p.alphabet:
            dist = {}
            for (s, y, r), w in p.prob.items():
                if s == q and y == x and w > 0:
                    t = Transition(q, x, 1, r)
                    ts.append(t)
                    dist[t] = w
            moves[(0, q, x)] = dist
        t = Transition(q, sep, 2 if q in p.accepting else 1, p.initial)
        ts.append(t)
        moves[(0, q, sep)] = {t: Fraction(1)}
    b = ParityAutomaton(
        states=p.states, alphabet=list(p.alphabet) + [sep], initial=p.initial, transitions=ts,
        bounds=(1, 2), name="pfa-buchi",
    )
    r = Resolver(memory=(0,), initial=0, moves=moves, name="pfa")
    return GadgetResult(b, r, tuple(notes), {"$": sep})


def pba_to_cobuchi(p: ProbabilisticParityAutomaton) -> GadgetResult:
    """coBüchi automaton and resolver whose acceptance on $·a·w is 1 − Prob_p(w)/2."""
    if p.bounds != (1, 2):
        raise InputError("pba_to_cobuchi needs a probabilistic Büchi automaton")
    notes = []
    letters = {}
    taken = set(p.alphabet)
    for base in ("$", "a", "b"):
        new = base if base not in taken else fresh_name(base, taken)
        if new != base:
            notes.append(f"letter {base} renamed to {new}")
        letters[base] = new
        taken.add(new)
    dollar, la, lb = letters["$"], letters["a"], letters["b"]
    names = [str(q) for q in p.states]
    s = fresh_name("s", names)
    s1 = fresh_name("s1", names + [s])
    s2 = fresh_name("s2", names + [s, s1])
    fin = fresh_name("s_fin", names + [s, s1, s2])
    q0 = p.initial
    ts = [Transition(t.src, t.letter, t.priority - 1, t.dst) for t in p.transitions]
    extra = [
        Transition(s, dollar, 0, s1), Transition(s, dollar, 0, s2),
        Transition(s1, la, 0, q0), Transition(s1, lb, 0, fin),
        Transition(s2, la, 0, fin), Transition(s2, lb, 0, q0),
    ]
    extra += [Transition(fin, x, 0, fin) for x in p.alphabet]
    alphabet = list(p.alphabet) + [dollar, la, lb]
    sink = fresh_name("sink", names + [s, s1, s2, fin])
    states, all_ts = complete_with_sink(list(p.states) + [s, s1, s2, fin], alphabet, ts + extra, sink=sink)
    c = ParityAutomaton(
        states=states, alphabet=alphabet, initial=s, transitions=all_ts, bounds=(0, 1),
        name="pba-cobuchi",
    )
    moves = {}
    for q in c.states:
        for x in c.alphabet:
            opts = c.delta(q, x)
            if q in p.states and x in p.alphabet:
                dist = {}
                for t in p.delta(q, x):
                    w = p.prob(t)
                    if w > 0:
                        dt = Transition(t.src, t.letter, t.priority - 1, t.dst)
                        dist[dt] = dist.get(dt, Fraction(0)) + w
                moves[(0, q, x)] = dist
            else:
                moves[(0, q, x)] = {t: Fraction(1, len(opts)) for t in opts}
    r = Resolver(memory=(0,), initial=0, moves=moves, name="pba")
    return GadgetResult(c, r, tuple(notes), letters)
