"""Language-level oracles over ultimately periodic words.

Containment ``L(a) ⊆ L(b)`` is decided by searching the product of ``a``
with an on-the-fly complement of ``b`` for a reachable cycle that satisfies
both parity conditions.  Three complement routes exist: priority shift for
deterministic automata, a breakpoint construction for coBüchi automata and
rank-based complementation for Büchi automata.  Other nondeterministic
parity targets go through the transition-profile monoid instead, since the
slice translation to Büchi makes rank vectors far too many.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Optional

from .automata import (
    LassoWord,
    ParityAutomaton,
    Transition,
    canon_key,
    fresh_name,
    sorted_canon,
)
from .errors import Budget, InputError, Limits, OracleMismatch, budget_for
from .games import solve_simulation
from .graphs import bfs_path, reachable, tarjan_scc


def _check_alphabet(a: ParityAutomaton, letters: Iterable) -> None:
    extra = set(letters) - set(a.alphabet)
    if extra:
        raise InputError(f"letters {sorted(extra)} not in alphabet of {a.name}")


def _even_cycle_exists(nodes, edges, d_values) -> bool:
    """Is there a cycle whose max priority is some even d in ``d_values``?"""
    for d in d_values:
        succ = defaultdict(list)
        for u, p, v in edges:
            if p <= d:
                succ[u].append(v)
        comp_of = {}
        for i, comp in enumerate(tarjan_scc(nodes, succ)):
            for x in comp:
                comp_of[x] = i
        for u, p, v in edges:
            if p == d and comp_of[u] == comp_of[v]:
                return True
    return False


def lasso_membership(a: ParityAutomaton, w: LassoWord) -> bool:
    _check_alphabet(a, w.letters())
    start = (a.initial, 0)
    seen = {start}
    todo = [start]
    edges = []
    while todo:
        q, pos = todo.pop()
        nxt = w.next_pos(pos)
        for t in a.delta(q, w.letter_at(pos)):
            v = (t.dst, nxt)
            edges.append(((q, pos), t.priority, v))
            if v not in seen:
                seen.add(v)
                todo.append(v)
    evens = sorted({p for _, p, _ in edges if p % 2 == 0})
    return _even_cycle_exists(list(seen), edges, evens)


def _slice_name(q, d):
    return f"{q}@{d}" if isinstance(q, str) else (q, f"@{d}")


def parity_to_buchi(a: ParityAutomaton) -> ParityAutomaton:
    """Slice translation.

    The top copy keeps the original state names.  For every even ``d``
    below the top there is a slice copy that only follows transitions of
    priority ≤ d and marks priority-d transitions accepting.  Slices are
    absorbing: a larger priority leads to a rejecting sink.
    """
    if a.bounds == (1, 2):
        return a
    lo, hi = a.bounds
    top_accepts = hi % 2 == 0
    slices = [d for d in range(lo, hi + 1) if d % 2 == 0 and not (top_accepts and d == hi)]
    states = list(a.states) + [_slice_name(q, d) for d in slices for q in a.states]
    ts = []
    sink = None
    if slices:
        sink = fresh_name("⊥", states)
        states.append(sink)
        ts += [Transition(sink, x, 1, sink) for x in a.alphabet]
    for t in a.transitions:
        top_prio = 2 if (top_accepts and t.priority == hi) else 1
        ts.append(Transition(t.src, t.letter, top_prio, t.dst))
        for d in slices:
            src = _slice_name(t.src, d)
            if t.priority <= d:
                mark = 2 if t.priority == d else 1
                ts.append(Transition(t.src, t.letter, mark, _slice_name(t.dst, d)))
                ts.append(Transition(src, t.letter, mark, _slice_name(t.dst, d)))
            else:
                ts.append(Transition(src, t.letter, 1, sink))
    return ParityAutomaton(
        states=states, alphabet=a.alphabet, initial=a.initial, transitions=ts,
        bounds=(1, 2), name=f"{a.name}_nba",
    )


# ---------------------------------------------------------------------------
# on-the-fly complements


class _Complement:
    initial: Hashable

    def __init__(self) -> None:
        self._cache: dict = {}

    def step(self, state, letter) -> list:
        key = (state, letter)
        if key not in self._cache:
            self._cache[key] = self._step(state, letter)
        return self._cache[key]

    def _step(self, state, letter) -> list:  # pragma: no cover - abstract
        raise NotImplementedError


class _DeterministicComplement(_Complement):
    def __init__(self, d: ParityAutomaton):
        super().__init__()
        self.d = d
        self.initial = d.initial

    def _step(self, q, x):
        (t,) = self.d.delta(q, x)
        return [(t.priority + 1, t.dst)]


class _BreakpointComplement(_Complement):
    """Complement of a coBüchi automaton: all runs see priority 1 forever."""

    def __init__(self, c: ParityAutomaton):
        super().__init__()
        self.c = c
        self.initial = (frozenset([c.initial]), frozenset())

    def _step(self, state, x):
        S, O = state
        S2 = frozenset(t.dst for q in S for t in self.c.delta(q, x))
        base = S if not O else O
        O2 = frozenset(t.dst for q in base for t in self.c.delta(q, x) if t.priority == 0)
        return [(2 if not O2 else 1, (S2, O2))]


def subset_width(b: ParityAutomaton, budget: Optional[Budget] = None) -> int:
    """Largest subset reachable in the subset construction of ``b``."""
    start = frozenset([b.initial])
    seen = {start}
    todo = [start]
    width = 1
    while todo:
        S = todo.pop()
        width = max(width, len(S))
        if width == len(b.states):
            return width
        for x in b.alphabet:
            S2 = frozenset(t.dst for q in S for t in b.delta(q, x))
            if S2 not in seen:
                if budget is not None:
                    budget.charge(1, "subset construction")
                seen.add(S2)
                todo.append(S2)
    return width


class _RankComplement(_Complement):
    """Rank-based complement of a transition-based Büchi automaton.

    A state is ``(ranking, owing)`` where ranking assigns a rank to every
    currently reachable state.  Ranks never increase along transitions, an
    accepting transition leaving an odd rank must strictly decrease it, and
    ``owing`` holds the even-ranked states not yet released since the last
    breakpoint.  Ranks are bounded by twice the width of the run DAG, which
    is at most the largest reachable subset.
    """

    def __init__(self, b: ParityAutomaton, budget: Optional[Budget] = None):
        super().__init__()
        if b.bounds != (1, 2):
            raise InputError("rank complementation needs a Büchi automaton")
        self.b = b
        self.max_rank = 2 * subset_width(b, budget)
        self.initial = (((b.initial, self.max_rank),), ())

    def _step(self, state, x):
        ranking, owing = state
        ub: dict = {}
        for q, r in ranking:
            for t in self.b.delta(q, x):
                cap = r - 1 if (t.priority == 2 and r % 2 == 1) else r
                ub[t.dst] = min(ub.get(t.dst, cap), cap)
        targets = sorted_canon(ub)
        owing_succ = {t.dst for q in owing for t in self.b.delta(q, x)}
        out = []
        for ranks in itertools.product(*(range(ub[q] + 1) for q in targets)):
            g2 = tuple(zip(targets, ranks))
            if owing:
                o2 = tuple(q for q, r in g2 if r % 2 == 0 and q in owing_succ)
            else:
                o2 = tuple(q for q, r in g2 if r % 2 == 0)
            out.append((2 if not o2 else 1, (g2, o2)))
        return out


def _complement_for(b: ParityAutomaton, budget: Budget) -> _Complement:
    bt = b.trim()
    if bt.is_deterministic():
        return _DeterministicComplement(bt)
    if bt.bounds == (0, 1):
        return _BreakpointComplement(bt)
    return _RankComplement(parity_to_buchi(bt), budget)


def complement_buchi(b: ParityAutomaton, limits: Optional[Limits] = None) -> ParityAutomaton:
    """Explicit rank-based complement of a Büchi automaton (reachable part)."""
    budget = budget_for(limits)
    comp = _RankComplement(b, budget)
    seen = {comp.initial}
    todo = [comp.initial]
    ts = []
    while todo:
        s = todo.pop()
        for x in b.alphabet:
            for prio, s2 in comp.step(s, x):
                ts.append(Transition(s, x, prio, s2))
                if s2 not in seen:
                    budget.charge(1, "complement states")
                    seen.add(s2)
                    todo.append(s2)
    return ParityAutomaton(
        states=seen, alphabet=b.alphabet, initial=comp.initial, transitions=ts,
        bounds=(1, 2), name=f"co-{b.name}",
    )


# ---------------------------------------------------------------------------
# product emptiness and containment


@dataclass(frozen=True)
class LanguageRelationVerdict:
    holds: bool
    counterexample: Optional[LassoWord] = None

    def __bool__(self) -> bool:
        return self.holds


def _find_joint_accepting_lasso(a: ParityAutomaton, comp: _Complement, budget: Budget) -> Optional[LassoWord]:
    start = (a.initial, comp.initial)
    seen = {start}
    todo = [start]
    edges = []  # (u, letter, pa, pc, v)
    adj: dict = defaultdict(list)
    while todo:
        u = todo.pop()
        qa, qc = u
        for x in a.alphabet:
            steps = comp.step(qc, x)
            for t in a.delta(qa, x):
                for pc, qc2 in steps:
                    v = (t.dst, qc2)
                    e = (u, x, t.priority, pc, v)
                    edges.append(e)
                    adj[u].append(e)
                    if v not in seen:
                        budget.charge(1, "containment product")
                        seen.add(v)
                        todo.append(v)
    nodes = list(seen)
    even_a = sorted({e[2] for e in edges if e[2] % 2 == 0})
    even_c = sorted({e[3] for e in edges if e[3] % 2 == 0})
    for da in even_a:
        for dc in even_c:
            allowed = [e for e in edges if e[2] <= da and e[3] <= dc]
            succ = defaultdict(list)
            for e in allowed:
                succ[e[0]].append(e[4])
            comp_of = {}
            for i, c in enumerate(tarjan_scc(nodes, succ)):
                for n in c:
                    comp_of[n] = i
            internal = [e for e in allowed if comp_of[e[0]] == comp_of[e[4]]]
            first_c: dict = {}
            for e in internal:
                if e[3] == dc:
                    first_c.setdefault(comp_of[e[0]], e)
            for ea in internal:
                cid = comp_of[ea[0]]
                if ea[2] == da and cid in first_c:
                    return _extract_lasso(start, adj, internal, comp_of, cid, ea, first_c[cid])
    return None


def _extract_lasso(start, adj, internal, comp_of, cid, ea, ec) -> LassoWord:
    inner = defaultdict(list)
    for e in internal:
        if comp_of[e[0]] == cid:
            inner[e[0]].append(e)

    def walk(src, dst, table):
        found = bfs_path([src], lambda n: n == dst, lambda n: [(e[1], e[4]) for e in table.get(n, ())])
        assert found is not None
        return found[1]

    stem = walk(start, ea[0], adj)
    cycle = [ea[1]] + walk(ea[4], ec[0], inner) + [ec[1]] + walk(ec[4], ea[0], inner)
    return LassoWord(tuple(stem), tuple(cycle))


def short_lassos(alphabet, max_candidates: int = 600):
    """Lassos in order of total length, stopping after ``max_candidates``."""
    letters = list(alphabet)
    n = 0
    for total in itertools.count(1):
        for plen in range(total):
            for pre in itertools.product(letters, repeat=plen):
                for per in itertools.product(letters, repeat=total - plen):
                    yield LassoWord(pre, per)
                    n += 1
                    if n >= max_candidates:
                        return


def _short_counterexample(a: ParityAutomaton, b: ParityAutomaton) -> Optional[LassoWord]:
    for w in short_lassos(a.alphabet):
        if lasso_membership(a, w) and not lasso_membership(b, w):
            return w
    return None


# ---------------------------------------------------------------------------
# transition profiles


def _letter_profile(a: ParityAutomaton, x) -> frozenset:
    return frozenset((t.src, t.dst, t.priority) for t in a.transitions if t.letter == x)


def _compose(f: frozenset, g: frozenset) -> frozenset:
    by_src = defaultdict(list)
    for q, r, m in g:
        by_src[q].append((r, m))
    return frozenset((p, r, max(m1, m2)) for p, q, m1 in f for r, m2 in by_src[q])


def _profile_accepts(initial, s: Optional[frozenset], e: frozenset) -> bool:
    """Acceptance of u·v^ω from the profile of u (None if empty) and the idempotent profile of v."""
    starts = {initial} if s is None else {q for p, q, _ in s if p == initial}
    loops = {r for r, r2, m in e if r == r2 and m % 2 == 0}
    return any(p in starts and r in loops for p, r, _ in e)


def _profile_counterexample(a: ParityAutomaton, b: ParityAutomaton, budget: Budget) -> Optional[LassoWord]:
    """Exact search for a lasso in L(a) minus L(b) over joint transition profiles.

    Every ultimately periodic word can be written u·v^ω with the joint
    profile of v idempotent, and acceptance of such a word depends only on
    the profiles of u and v.
    """
    letters = {x: (_letter_profile(a, x), _letter_profile(b, x)) for x in a.alphabet}
    word = {}
    todo = []
    for x in sorted_canon(a.alphabet):
        if letters[x] not in word:
            word[letters[x]] = (x,)
            todo.append(letters[x])
    while todo:
        f = todo.pop(0)
        for x in sorted_canon(a.alphabet):
            g = letters[x]
            h = (_compose(f[0], g[0]), _compose(f[1], g[1]))
            if h not in word:
                budget.charge(1, "profile monoid")
                word[h] = word[f] + (x,)
                todo.append(h)
    idem = [e for e in word if (_compose(e[0], e[0]), _compose(e[1], e[1])) == e]
    heads = [None] + sorted(word, key=lambda f: (len(word[f]), canon_key(word[f])))
    idem.sort(key=lambda e: (len(word[e]), canon_key(word[e])))
    for s in heads:
        for e in idem:
            sa, sb = (None, None) if s is None else s
            if _profile_accepts(a.initial, sa, e[0]) and not _profile_accepts(b.initial, sb, e[1]):
                return LassoWord(() if s is None else word[s], word[e])
    return None


def contains(
    a: ParityAutomaton, b: ParityAutomaton, limits: Optional[Limits] = None,
    budget: Optional[Budget] = None, use_simulation: bool = True,
) -> LanguageRelationVerdict:
    """Decide ``L(a) ⊆ L(b)``; on failure return a revalidated counterexample.

    Simulation of ``a`` by ``b`` is tried first as a cheap sufficient test;
    the complement product is the deciding route.
    """
    if set(a.alphabet) != set(b.alphabet):
        raise InputError("containment needs a shared alphabet")
    budget = budget or budget_for(limits)
    if use_simulation and solve_simulation(a, b, budget.limits):
        return LanguageRelationVerdict(True)
    w = _short_counterexample(a, b)
    if w is not None:
        return LanguageRelationVerdict(False, w)
    bt = b.trim()
    if bt.is_deterministic() or bt.bounds in ((0, 1), (1, 2)):
        w = _find_joint_accepting_lasso(a, _complement_for(bt, budget), budget)
    else:
        w = _profile_counterexample(a.trim(), bt, budget)
    if w is None:
        return LanguageRelationVerdict(True)
    if not lasso_membership(a, w) or lasso_membership(b, w):
        raise OracleMismatch(f"containment counterexample {w} failed revalidation")
    return LanguageRelationVerdict(False, w)


def equivalent(
    a: ParityAutomaton, b: ParityAutomaton, limits: Optional[Limits] = None,
    budget: Optional[Budget] = None,
) -> LanguageRelationVerdict:
    budget = budget or budget_for(limits)
    left = contains(a, b, budget=budget)
    if not left.holds:
        return left
    return contains(b, a, budget=budget)


def is_empty(a: ParityAutomaton) -> bool:
    """Language emptiness via a reachable even-max cycle."""
    live = set(a.reachable_states())
    succ_edges = [(t.src, t.priority, t.dst) for t in a.transitions if t.src in live]
    evens = sorted({p for _, p, _ in succ_edges if p % 2 == 0})
    return not _even_cycle_exists(a.reachable_states(), succ_edges, evens)


class LanguageOracle:
    """Caches state-language equivalences of one automaton."""

    def __init__(self, a: ParityAutomaton, limits: Optional[Limits] = None, budget: Optional[Budget] = None):
        self.a = a
        self.budget = budget or budget_for(limits)
        self._eq: dict = {}
        self._sub: dict = {}

    def contains(self, p, q) -> LanguageRelationVerdict:
        key = (p, q)
        if key not in self._sub:
            if p == q:
                self._sub[key] = LanguageRelationVerdict(True)
            else:
                self._sub[key] = contains(self.a.with_initial(p), self.a.with_initial(q), budget=self.budget)
        return self._sub[key]

    def equivalent(self, p, q) -> LanguageRelationVerdict:
        left = self.contains(p, q)
        return left if not left.holds else self.contains(q, p)


def successors_equivalent(
    a: ParityAutomaton, q, letter, limits: Optional[Limits] = None,
    oracle: Optional[LanguageOracle] = None,
) -> bool:
    return successor_counterexample(a, q, letter, limits, oracle) is None


def successor_counterexample(a, q, letter, limits=None, oracle=None):
    """None if all successors agree, else ``(p, r, lasso)`` with differing languages."""
    oracle = oracle or LanguageOracle(a, limits)
    targets = a.successors(q, letter)
    for r in targets[1:]:
        v = oracle.equivalent(targets[0], r)
        if not v.holds:
            return targets[0], r, v.counterexample
    return None


# ---------------------------------------------------------------------------
# flowers


@dataclass(frozen=True)
class FlowerWitness:
    state: Hashable
    shift: int
    loops: dict = field(default_factory=dict)  # k -> loop word through state


def _cycle_values(d: ParityAutomaton) -> dict:
    """For each state, the exact maxima of closed walks through it."""
    states = d.reachable_states()
    sset = set(states)
    values = defaultdict(dict)
    for v in sorted(set(d.priorities())):
        succ = defaultdict(list)
        for t in d.transitions:
            if t.src in sset and t.priority <= v:
                succ[t.src].append(t.dst)
        comp_of = {}
        for i, c in enumerate(tarjan_scc(states, succ)):
            for q in c:
                comp_of[q] = i
        hits = {}
        for t in d.transitions:
            if t.src in sset and t.priority == v and comp_of[t.src] == comp_of[t.dst]:
                hits.setdefault(comp_of[t.src], t)
        for q in states:
            if comp_of[q] in hits:
                values[q][v] = (hits[comp_of[q]], comp_of, v)
    return values


def _loop_word(d: ParityAutomaton, p, info) -> tuple:
    t, comp_of, v = info
    cid = comp_of[p]

    def edges(n):
        return [(e.letter, e.dst) for e in d.out(n) if e.priority <= v and comp_of.get(e.dst) == cid]

    to_src = bfs_path([p], lambda n: n == t.src, edges)[1]
    back = bfs_path([t.dst], lambda n: n == p, edges)[1]
    return tuple(to_src + [t.letter] + back)


def detect_flower(d: ParityAutomaton, span) -> Optional[FlowerWitness]:
    """Find a state whose loops realise every value ``2*shift + k``, k in span."""
    if not d.is_deterministic():
        raise InputError("flower detection needs a deterministic automaton")
    lo, hi = int(span[0]), int(span[1])
    values = _cycle_values(d)
    top = max(d.priorities())
    for p in d.reachable_states():
        have = values.get(p, {})
        shift = -((lo) // 2)
        while 2 * shift + hi <= top:
            wanted = [2 * shift + k for k in range(lo, hi + 1)]
            if min(wanted) >= 0 and all(v in have for v in wanted):
                loops = {k: _loop_word(d, p, have[2 * shift + k]) for k in range(lo, hi + 1)}
                return FlowerWitness(p, shift, loops)
            shift += 1
    return None
