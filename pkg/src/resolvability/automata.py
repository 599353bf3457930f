"""Parity automata, probabilistic parity automata, resolvers and lasso words.

Acceptance is transition-based and max-even: a run is accepting iff the
largest priority it sees infinitely often is even.  All probabilities are
``fractions.Fraction`` values.
"""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Hashable, Iterable, Mapping, NamedTuple, Optional

from .errors import InputError
from .graphs import reachable, tarjan_scc


def canon_key(x: Any):
    """Total order over the mix of strings, ints and tuples used as names."""
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, int):
        return (0, x)
    if isinstance(x, str):
        return (1, x)
    if isinstance(x, tuple):
        return (2, tuple(canon_key(y) for y in x))
    if isinstance(x, frozenset):
        return (3, tuple(sorted(canon_key(y) for y in x)))
    if x is None:
        return (-1,)
    return (4, repr(x))


def sorted_canon(xs: Iterable) -> list:
    return sorted(xs, key=canon_key)


class Transition(NamedTuple):
    src: Hashable
    letter: str
    priority: int
    dst: Hashable


def transition_key(t: Transition):
    return (canon_key(t.src), canon_key(t.letter), t.priority, canon_key(t.dst))


class AcceptanceClass(str, enum.Enum):
    SAFETY = "Safety"
    REACHABILITY = "Reachability"
    WEAK = "Weak"
    BUCHI = "Buchi"
    COBUCHI = "CoBuchi"
    PARITY = "Parity"


@dataclass(frozen=True)
class LassoWord:
    """The ultimately periodic word ``prefix · period^ω``."""

    prefix: tuple
    period: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "period", tuple(self.period))
        if not self.period:
            raise InputError("lasso period must be nonempty")

    @property
    def positions(self) -> int:
        return len(self.prefix) + len(self.period)

    def letter_at(self, pos: int) -> str:
        n = len(self.prefix)
        return self.prefix[pos] if pos < n else self.period[pos - n]

    def next_pos(self, pos: int) -> int:
        nxt = pos + 1
        return len(self.prefix) if nxt == self.positions else nxt

    def letters(self) -> set:
        return set(self.prefix) | set(self.period)

    def unroll(self, n: int) -> tuple:
        out = list(self.prefix)
        i = 0
        while len(out) < n:
            out.append(self.period[i % len(self.period)])
            i += 1
        return tuple(out[:n])

    def __str__(self) -> str:
        letters = self.prefix + self.period
        if any(len(x) != 1 for x in letters):
            return " ".join(self.prefix + ("|",) + self.period)
        sep = "|" if "$" in letters else "$"
        return "".join(self.prefix) + sep + "".join(self.period)


@dataclass(frozen=True, kw_only=True)
class ParityAutomaton:
    states: tuple
    alphabet: tuple
    initial: Hashable
    transitions: tuple
    bounds: tuple = (1, 2)
    name: str = "A"

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(sorted_canon(set(self.states))))
        object.__setattr__(self, "alphabet", tuple(sorted_canon(set(self.alphabet))))
        ts = {Transition(*t) for t in self.transitions}
        object.__setattr__(self, "transitions", tuple(sorted(ts, key=transition_key)))
        object.__setattr__(self, "bounds", (int(self.bounds[0]), int(self.bounds[1])))
        self._validate()

    def _validate(self) -> None:
        lo, hi = self.bounds
        if lo not in (0, 1) or hi < lo:
            raise InputError(f"bad priority bounds [{lo},{hi}]")
        sset = set(self.states)
        aset = set(self.alphabet)
        if self.initial not in sset:
            raise InputError(f"initial state {self.initial!r} is not a state")
        for t in self.transitions:
            if t.src not in sset or t.dst not in sset:
                raise InputError(f"transition {t} has an unknown endpoint")
            if t.letter not in aset:
                raise InputError(f"transition {t} uses a letter outside the alphabet")
            if not (lo <= t.priority <= hi):
                raise InputError(f"transition {t} has priority outside [{lo},{hi}]")
        for q in self.states:
            for a in self.alphabet:
                if not self.delta(q, a):
                    raise InputError(f"incomplete: no transition from {q!r} on {a!r}")

    @cached_property
    def _index(self) -> dict:
        idx: dict = defaultdict(list)
        for t in self.transitions:
            idx[(t.src, t.letter)].append(t)
        return {k: tuple(v) for k, v in idx.items()}

    @cached_property
    def _out(self) -> dict:
        out: dict = defaultdict(list)
        for t in self.transitions:
            out[t.src].append(t)
        return {k: tuple(v) for k, v in out.items()}

    def delta(self, q, a) -> tuple:
        return self._index.get((q, a), ())

    def out(self, q) -> tuple:
        return self._out.get(q, ())

    def successors(self, q, a) -> list:
        return sorted_canon({t.dst for t in self.delta(q, a)})

    def is_deterministic(self, only_reachable: bool = True) -> bool:
        states = self.reachable_states() if only_reachable else self.states
        return all(len(self.delta(q, a)) == 1 for q in states for a in self.alphabet)

    @cached_property
    def _reach(self) -> frozenset:
        succ = {q: [t.dst for t in self.out(q)] for q in self.states}
        return frozenset(reachable([self.initial], succ))

    def reachable_states(self) -> list:
        return sorted_canon(self._reach)

    def priorities(self) -> list:
        return sorted({t.priority for t in self.transitions})

    def with_initial(self, q) -> "ParityAutomaton":
        return ParityAutomaton(
            states=self.states, alphabet=self.alphabet, initial=q,
            transitions=self.transitions, bounds=self.bounds, name=self.name,
        )

    def renamed(self, name: str) -> "ParityAutomaton":
        return ParityAutomaton(
            states=self.states, alphabet=self.alphabet, initial=self.initial,
            transitions=self.transitions, bounds=self.bounds, name=name,
        )

    def trim(self) -> "ParityAutomaton":
        """Restriction to the states reachable from the initial state."""
        keep = self._reach
        return ParityAutomaton(
            states=keep, alphabet=self.alphabet, initial=self.initial,
            transitions=[t for t in self.transitions if t.src in keep],
            bounds=self.bounds, name=self.name,
        )

    def subautomaton(self, transitions: Iterable) -> "ParityAutomaton":
        """Sub-automaton over ``transitions`` restricted to its reachable part.

        Raises InputError if a transition is not in this automaton or the
        result is incomplete on its reachable part.
        """
        ts = {Transition(*t) for t in transitions}
        mine = set(self.transitions)
        extra = ts - mine
        if extra:
            raise InputError(f"not a subautomaton: {sorted(extra, key=transition_key)[0]} is foreign")
        succ: dict = defaultdict(list)
        for t in ts:
            succ[t.src].append(t.dst)
        keep = reachable([self.initial], succ)
        for q in keep:
            for a in self.alphabet:
                if not any(t.src == q and t.letter == a for t in ts):
                    raise InputError(
                        f"not a subautomaton: reachable ({q!r}, {a!r}) lost all transitions"
                    )
        return ParityAutomaton(
            states=keep, alphabet=self.alphabet, initial=self.initial,
            transitions=[t for t in ts if t.src in keep], bounds=self.bounds,
            name=self.name,
        )


def complete_with_sink(
    states: Iterable, alphabet: Iterable, transitions: Iterable, sink: Hashable = "sink",
    priority: int = 1,
) -> tuple[list, list]:
    """Add a rejecting sink for every missing (state, letter) pair.

    Returns ``(states, transitions)``; the sink is only added when needed.
    """
    states = list(dict.fromkeys(states))
    alphabet = list(alphabet)
    ts = [Transition(*t) for t in transitions]
    have = {(t.src, t.letter) for t in ts}
    missing = [(q, a) for q in states for a in alphabet if (q, a) not in have]
    if missing:
        if sink in states and any(t.src == sink for t in ts):
            raise InputError(f"sink name {sink!r} already in use")
        if sink not in states:
            states.append(sink)
        for q, a in missing:
            ts.append(Transition(q, a, priority, sink))
        for a in alphabet:
            if (sink, a) not in have:
                ts.append(Transition(sink, a, priority, sink))
    return states, ts


def fresh_name(base: str, taken: Iterable) -> str:
    taken = set(taken)
    if base not in taken:
        return base
    i = 0
    while f"{base}{i}" in taken:
        i += 1
    return f"{base}{i}"


@dataclass(frozen=True, kw_only=True)
class ProbabilisticParityAutomaton(ParityAutomaton):
    rho: Mapping = field(default_factory=dict)

    def __post_init__(self) -> None:
        super().__post_init__()
        rho = {Transition(*t): Fraction(p) for t, p in dict(self.rho).items()}
        tset = set(self.transitions)
        for t, p in rho.items():
            if t not in tset:
                raise InputError(f"probability given for unknown transition {t}")
            if p < 0 or p > 1:
                raise InputError(f"probability {p} of {t} outside [0,1]")
        for q in self.states:
            for a in self.alphabet:
                total = sum((rho.get(t, Fraction(0)) for t in self.delta(q, a)), Fraction(0))
                if total != 1:
                    raise InputError(
                        f"probabilities at ({q!r}, {a!r}) sum to {total}, expected 1"
                    )
        object.__setattr__(self, "rho", rho)

    def prob(self, t: Transition) -> Fraction:
        return self.rho.get(t, Fraction(0))

    def support(self, q, a) -> list:
        return [t for t in self.delta(q, a) if self.rho.get(t, 0) > 0]

    def underlying(self) -> ParityAutomaton:
        return ParityAutomaton(
            states=self.states, alphabet=self.alphabet, initial=self.initial,
            transitions=self.transitions, bounds=self.bounds, name=self.name,
        )


@dataclass(frozen=True, kw_only=True)
class Resolver:
    """Finite-memory stochastic resolver.

    ``moves`` maps ``(memory, state, letter)`` to a mapping from transitions
    to weights.  ``update`` maps ``(memory, transition)`` to the next memory;
    a memoryless resolver may leave it empty.
    """

    memory: tuple
    initial: Hashable
    moves: Mapping
    update: Mapping = field(default_factory=dict)
    name: str = "r"

    def __post_init__(self) -> None:
        object.__setattr__(self, "memory", tuple(sorted_canon(set(self.memory))))
        moves = {
            k: {Transition(*t): Fraction(w) for t, w in dist.items()}
            for k, dist in dict(self.moves).items()
        }
        object.__setattr__(self, "moves", moves)
        upd = {(m, Transition(*t)): m2 for (m, t), m2 in dict(self.update).items()}
        object.__setattr__(self, "update", upd)
        if self.initial not in self.memory:
            raise InputError("initial memory is not a memory state")
        for k, dist in moves.items():
            total = sum(dist.values(), Fraction(0))
            if total != 1 or any(w < 0 for w in dist.values()):
                raise InputError(f"resolver distribution at {k} sums to {total}, expected 1")

    @property
    def memoryless(self) -> bool:
        return len(self.memory) == 1

    @property
    def pure(self) -> bool:
        return all(sum(1 for w in d.values() if w > 0) == 1 for d in self.moves.values())

    def next_move(self, m, q, a) -> dict:
        try:
            return self.moves[(m, q, a)]
        except KeyError:
            raise InputError(f"resolver has no move for memory {m!r}, state {q!r}, letter {a!r}")

    def next_memory(self, m, t: Transition):
        if (m, t) in self.update:
            return self.update[(m, t)]
        if self.memoryless:
            return m
        raise InputError(f"resolver has no update for memory {m!r} on {t}")

    def validate_for(self, a: ParityAutomaton) -> None:
        for m in self.memory:
            for q in a.states:
                for x in a.alphabet:
                    dist = self.next_move(m, q, x)
                    allowed = set(a.delta(q, x))
                    for t, w in dist.items():
                        if w > 0 and t not in allowed:
                            raise InputError(f"resolver support {t} is not a transition of the automaton")
                        if w > 0:
                            m2 = self.next_memory(m, t)
                            if m2 not in self.memory:
                                raise InputError(f"update leads to unknown memory {m2!r}")


def uniform_resolver(a: ParityAutomaton, name: str = "uniform") -> Resolver:
    moves = {}
    for q in a.states:
        for x in a.alphabet:
            ts = a.delta(q, x)
            moves[(0, q, x)] = {t: Fraction(1, len(ts)) for t in ts}
    return Resolver(memory=(0,), initial=0, moves=moves, name=name)


def resolver_product(r: Resolver, a: ParityAutomaton) -> ProbabilisticParityAutomaton:
    """Compose ``r`` with ``a``.

    For a memoryless resolver the product states keep the automaton's state
    names; otherwise they are ``(state, memory)`` pairs.
    """
    r.validate_for(a)
    flat = r.memoryless

    def name(q, m):
        return q if flat else (q, m)

    states = [name(q, m) for q in a.states for m in r.memory]
    transitions = []
    rho = {}
    for q in a.states:
        for m in r.memory:
            for x in a.alphabet:
                for t, w in r.next_move(m, q, x).items():
                    if w == 0:
                        continue
                    pt = Transition(name(q, m), x, t.priority, name(t.dst, r.next_memory(m, t)))
                    transitions.append(pt)
                    rho[pt] = rho.get(pt, Fraction(0)) + w
    return ProbabilisticParityAutomaton(
        states=states, alphabet=a.alphabet, initial=name(a.initial, r.initial),
        transitions=transitions, bounds=a.bounds, name=f"{r.name}*{a.name}", rho=rho,
    )


# ---------------------------------------------------------------------------
# structural classification and transforms


def _sinks(a: ParityAutomaton, parity: int) -> set:
    out = set()
    for q in a.states:
        ts = a.out(q)
        if ts and all(t.dst == q and t.priority % 2 == parity for t in ts):
            out.add(q)
    return out


def is_weak(a: ParityAutomaton) -> bool:
    succ = {q: [t.dst for t in a.out(q)] for q in a.states}
    comp_of = {}
    for i, comp in enumerate(tarjan_scc(a.states, succ)):
        for q in comp:
            comp_of[q] = i
    parity_of: dict = {}
    for t in a.transitions:
        c = comp_of[t.src]
        if c != comp_of[t.dst]:
            continue
        p = t.priority % 2
        if parity_of.setdefault(c, p) != p:
            return False
    return True


def classify_acceptance(a: ParityAutomaton) -> AcceptanceClass:
    rejecting = _sinks(a, 1)
    if all(t.priority % 2 == 0 or t.dst in rejecting for t in a.transitions):
        return AcceptanceClass.SAFETY
    accepting = _sinks(a, 0)
    if all(t.priority % 2 == 1 or t.dst in accepting for t in a.transitions):
        return AcceptanceClass.REACHABILITY
    if is_weak(a):
        return AcceptanceClass.WEAK
    if a.bounds == (1, 2):
        return AcceptanceClass.BUCHI
    if a.bounds == (0, 1):
        return AcceptanceClass.COBUCHI
    return AcceptanceClass.PARITY


def _require_cobuchi(a: ParityAutomaton, op: str) -> None:
    if a.bounds != (0, 1):
        raise InputError(f"{op} needs a coBüchi automaton with bounds [0,1], got {list(a.bounds)}")


def priority_reduce(a: ParityAutomaton) -> ParityAutomaton:
    """Demote priority-0 transitions that lie on no priority-0 cycle."""
    _require_cobuchi(a, "priority_reduce")
    succ: dict = defaultdict(list)
    for t in a.transitions:
        if t.priority == 0:
            succ[t.src].append(t.dst)
    comp_of = {}
    for i, comp in enumerate(tarjan_scc(a.states, succ)):
        for q in comp:
            comp_of[q] = i
    ts = []
    for t in a.transitions:
        if t.priority == 0 and comp_of[t.src] != comp_of[t.dst]:
            t = t._replace(priority=1)
        ts.append(t)
    return ParityAutomaton(
        states=a.states, alphabet=a.alphabet, initial=a.initial, transitions=ts,
        bounds=a.bounds, name=a.name,
    )


def safe_approximation(a: ParityAutomaton, sink: Optional[Hashable] = None) -> ParityAutomaton:
    """Redirect every priority-1 transition into a fresh rejecting sink."""
    _require_cobuchi(a, "safe_approximation")
    bot = sink if sink is not None else fresh_name("⊥", [str(q) for q in a.states])
    ts = []
    for t in a.transitions:
        ts.append(t if t.priority == 0 else Transition(t.src, t.letter, 1, bot))
    ts.extend(Transition(bot, x, 1, bot) for x in a.alphabet)
    return ParityAutomaton(
        states=list(a.states) + [bot], alphabet=a.alphabet, initial=a.initial,
        transitions=ts, bounds=(0, 1), name=f"{a.name}_safe",
    )


def coreachability(a: ParityAutomaton) -> frozenset:
    """Pairs of states reachable from the initial state on a common word."""
    start = (a.initial, a.initial)
    seen = {start}
    todo = [start]
    while todo:
        p, q = todo.pop()
        for x in a.alphabet:
            for p2 in a.successors(p, x):
                for q2 in a.successors(q, x):
                    if (p2, q2) not in seen:
                        seen.add((p2, q2))
                        todo.append((p2, q2))
    return frozenset(seen)


def weak_coreachability(a: ParityAutomaton) -> list[frozenset]:
    """Classes of the transitive closure of coreachability."""
    parent = {q: q for q in a.reachable_states()}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p, q in coreachability(a):
        rp, rq = find(p), find(q)
        if rp != rq:
            parent[rp] = rq
    classes: dict = defaultdict(set)
    for q in parent:
        classes[find(q)].add(q)
    out = [frozenset(c) for c in classes.values()]
    return sorted(out, key=lambda c: canon_key(min(c, key=canon_key)))
