"""Acceptance probabilities of probabilistic parity automata.

On a lasso word u·v^ω the run of a probabilistic automaton is a finite
Markov chain over (state, position) pairs.  A run is eventually trapped in
a bottom SCC and then takes every internal edge infinitely often, so it is
accepting iff the largest internal priority of that SCC is even.  Reach
probabilities are obtained by exact Gauss-Jordan elimination over Fractions.
"""

from __future__ import annotations

import math
import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Optional, Sequence

from .automata import LassoWord, ProbabilisticParityAutomaton, Transition, canon_key, sorted_canon
from .errors import InputError
from .graphs import tarjan_scc


def _check_letters(p: ProbabilisticParityAutomaton, letters: Iterable) -> None:
    extra = set(letters) - set(p.alphabet)
    if extra:
        raise InputError(f"letters {sorted(map(str, extra))} are not in the alphabet")


@dataclass(frozen=True)
class ChainEdge:
    src: tuple
    dst: tuple
    prob: Fraction
    priority: int
    transition: Transition


@dataclass(frozen=True)
class LassoChain:
    initial: tuple
    states: tuple
    out: dict  # node -> tuple[ChainEdge]

    @classmethod
    def build(cls, p: ProbabilisticParityAutomaton, w: LassoWord) -> "LassoChain":
        _check_letters(p, w.letters())
        start = (p.initial, 0)
        out: dict = {}
        todo = [start]
        seen = {start}
        while todo:
            node = todo.pop()
            q, pos = node
            nxt = w.next_pos(pos)
            es = []
            for t in p.support(q, w.letter_at(pos)):
                d = (t.dst, nxt)
                es.append(ChainEdge(node, d, p.prob(t), t.priority, t))
                if d not in seen:
                    seen.add(d)
                    todo.append(d)
            total = sum((e.prob for e in es), Fraction(0))
            if total != 1:
                raise InputError(f"outgoing probability at {node} is {total}")
            out[node] = tuple(es)
        return cls(start, tuple(sorted_canon(seen)), out)

    def bottom_sccs(self) -> list[frozenset]:
        succ = {v: [e.dst for e in self.out[v]] for v in self.states}
        res = []
        for comp in tarjan_scc(self.states, succ):
            cs = frozenset(comp)
            if all(e.dst in cs for v in cs for e in self.out[v]):
                res.append(cs)
        return res


@dataclass(frozen=True)
class BsccInfo:
    states: frozenset
    max_priority: int
    accepting: bool
    reach: Fraction


@dataclass(frozen=True)
class AcceptanceProbability:
    value: Fraction
    components: tuple

    def __float__(self) -> float:
        return float(self.value)


def solve_linear(matrix: list, rhs: list) -> list:
    """Solve ``matrix · X = rhs`` exactly; ``rhs`` rows may hold several columns."""
    n = len(matrix)
    width = len(rhs[0]) if rhs else 0
    m = [list(map(Fraction, row)) + list(map(Fraction, r)) for row, r in zip(matrix, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise InputError("singular linear system")
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            f = m[r][col]
            if r != col and f != 0:
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [row[n:n + width] for row in m]


def lasso_acceptance_probability(p: ProbabilisticParityAutomaton, w: LassoWord) -> AcceptanceProbability:
    chain = LassoChain.build(p, w)
    bsccs = chain.bottom_sccs()
    where = {v: i for i, b in enumerate(bsccs) for v in b}
    transient = [v for v in chain.states if v not in where]
    idx = {v: i for i, v in enumerate(transient)}
    k = len(bsccs)
    if chain.initial in where:
        reach = [Fraction(int(where[chain.initial] == i)) for i in range(k)]
    else:
        matrix = [[Fraction(0)] * len(transient) for _ in transient]
        rhs = [[Fraction(0)] * k for _ in transient]
        for v in transient:
            i = idx[v]
            matrix[i][i] += 1
            for e in chain.out[v]:
                if e.dst in idx:
                    matrix[i][idx[e.dst]] -= e.prob
                else:
                    rhs[i][where[e.dst]] += e.prob
        reach = solve_linear(matrix, rhs)[idx[chain.initial]]
    comps = []
    for i, b in enumerate(bsccs):
        top = max(e.priority for v in b for e in chain.out[v])
        comps.append(BsccInfo(b, top, top % 2 == 0, reach[i]))
    value = sum((c.reach for c in comps if c.accepting), Fraction(0))
    return AcceptanceProbability(value, tuple(comps))


def prefix_state_distribution(
    p: ProbabilisticParityAutomaton, u: Sequence, start: Optional[dict] = None,
) -> dict:
    """Exact state distribution after reading the finite word ``u``."""
    _check_letters(p, u)
    dist = dict(start) if start is not None else {p.initial: Fraction(1)}
    for x in u:
        nxt: dict = defaultdict(Fraction)
        for q, mass in dist.items():
            for t in p.support(q, x):
                nxt[t.dst] += mass * p.prob(t)
        dist = {q: m for q, m in nxt.items() if m}
    return dict(sorted(dist.items(), key=lambda kv: canon_key(kv[0])))


def prefix_hit_probability(
    p: ProbabilisticParityAutomaton, u: Sequence, hit: Callable[[Transition], bool],
    start: Optional[dict] = None,
) -> Fraction:
    """Probability that the run on ``u`` takes at least one transition satisfying ``hit``."""
    _check_letters(p, u)
    dist = {(q, False): m for q, m in (start or {p.initial: Fraction(1)}).items()}
    for x in u:
        nxt: dict = defaultdict(Fraction)
        for (q, flag), mass in dist.items():
            for t in p.support(q, x):
                nxt[(t.dst, flag or hit(t))] += mass * p.prob(t)
        dist = nxt
    return sum((m for (_, flag), m in dist.items() if flag), Fraction(0))


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    radius: float
    accepted: int
    trials: int
    unresolved: int
    confidence: float = 0.99

    def contains(self, exact) -> bool:
        return abs(self.estimate - float(exact)) <= self.radius + 1e-12


def hoeffding_radius(trials: int, confidence: float = 0.99) -> float:
    return math.sqrt(math.log(2 / (1 - confidence)) / (2 * trials))


def monte_carlo_estimate(
    p: ProbabilisticParityAutomaton, w: LassoWord, trials: int, horizon_periods: int, seed: Hashable,
    confidence: float = 0.99,
) -> MonteCarloEstimate:
    """Seeded estimate of the acceptance probability on a lasso.

    Each trial walks the lasso chain with its own generator derived from
    ``(seed, trial)``.  A trial is decided as soon as it enters a bottom SCC
    (accepting iff that SCC's top internal priority is even).  Trials still
    transient when the horizon runs out are decided by the top priority on
    the stretch since the last state-position repetition and counted as
    unresolved.
    """
    if trials < 1:
        raise InputError("trials must be at least 1")
    if horizon_periods < len(p.states):
        raise InputError("horizon must be at least the number of states")
    if not 0 < confidence < 1:
        raise InputError("confidence must lie in (0,1)")
    chain = LassoChain.build(p, w)
    verdict = {}
    for b in chain.bottom_sccs():
        top = max(e.priority for v in b for e in chain.out[v])
        for v in b:
            verdict[v] = top % 2 == 0
    sampler = {}
    for v, es in chain.out.items():
        acc, cum = 0.0, []
        for e in es:
            acc += float(e.prob)
            cum.append(acc)
        sampler[v] = (es, cum)
    steps = len(w.prefix) + horizon_periods * len(w.period)
    accepted = unresolved = 0
    for trial in range(trials):
        rng = random.Random(f"{seed}:{trial}")
        v = chain.initial
        visits = {v: [0]}
        trace: list = []
        decided = verdict.get(v)
        while decided is None and len(trace) < steps:
            es, cum = sampler[v]
            e = rng.choices(es, cum_weights=cum)[0]
            trace.append(e.priority)
            v = e.dst
            visits.setdefault(v, []).append(len(trace))
            decided = verdict.get(v)
        if decided is None:
            unresolved += 1
            seen = visits[v]
            decided = len(seen) > 1 and max(trace[seen[-2]:seen[-1]]) % 2 == 0
        accepted += int(decided)
    est = accepted / trials
    return MonteCarloEstimate(est, hoeffding_radius(trials, confidence), accepted, trials, unresolved, confidence)
