"""Membership tests for the resolver classes and the coBüchi SR-to-MA conversion.

Verdicts are one of ``yes``, ``no`` or ``unknown``.  The report keeps a
note per verdict saying which fact produced it, and the implications
between the classes are checked before a report is returned.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

from .automata import (
    AcceptanceClass,
    LassoWord,
    ParityAutomaton,
    Transition,
    classify_acceptance,
    priority_reduce,
    resolver_product,
    safe_approximation,
    transition_key,
    uniform_resolver,
    weak_coreachability,
)
from .errors import Budget, InputError, Limits, OracleMismatch, ResolvabilityError, ResourceLimitError, budget_for
from .games import ADAM, build_two_token_game, is_history_deterministic, two_token_eve_wins
from .lang import LanguageOracle, contains, equivalent, lasso_membership, successor_counterexample
from .mdp import Mdp, positive_muller
from .prob import lasso_acceptance_probability
from .zielonka import max_vector_predicate, zielonka_dag

YES, NO, UNKNOWN = "yes", "no", "unknown"
CLASSES = ("SD", "preSD", "HD", "MA", "SR", "MR")

# (premise class, conclusion class): premise yes implies conclusion yes
IMPLICATIONS = (
    ("MA", "HD"),
    ("MA", "MR"),
    ("HD", "SR"),
    ("MR", "SR"),
    ("SR", "preSD"),
    ("SD", "preSD"),
)


@dataclass
class ClassificationReport:
    acceptance: AcceptanceClass
    verdicts: dict = field(default_factory=lambda: {c: UNKNOWN for c in CLASSES})
    evidence: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def set(self, cls: str, value, note: str) -> None:
        if isinstance(value, bool):
            value = YES if value else NO
        self.verdicts[cls] = value
        self.notes[cls] = note

    def check_lattice(self) -> None:
        v = self.verdicts
        for a, b in IMPLICATIONS:
            if v[a] == YES and v[b] == NO:
                raise OracleMismatch(f"report violates {a} => {b}")


# ---------------------------------------------------------------------------
# semantic determinism


@dataclass(frozen=True)
class SdVerdict:
    holds: bool
    witness: Optional[tuple] = None  # (state, letter, p, r, lasso)

    def __bool__(self) -> bool:
        return self.holds


def is_semantically_deterministic(
    a: ParityAutomaton, limits: Optional[Limits] = None, budget: Optional[Budget] = None,
) -> SdVerdict:
    """All reachable nondeterministic choices lead to language-equivalent states."""
    oracle = LanguageOracle(a, limits, budget)
    for q in a.reachable_states():
        for x in a.alphabet:
            if len(a.successors(q, x)) < 2:
                continue
            bad = successor_counterexample(a, q, x, oracle=oracle)
            if bad is not None:
                return SdVerdict(False, (q, x) + tuple(bad))
    return SdVerdict(True)


# ---------------------------------------------------------------------------
# subautomaton enumeration


def _removable(a: ParityAutomaton) -> list:
    groups = defaultdict(list)
    for t in a.transitions:
        if t.src in set(a.reachable_states()):
            groups[(t.src, t.letter)].append(t)
    return [t for g in groups.values() if len(g) > 1 for t in g]


def subautomata(a: ParityAutomaton, limits: Optional[Limits] = None):
    """Complete subautomata of ``a``, largest first, without repeats.

    Only reachable nondeterministic choices are removable, and no
    reachable (state, letter) pair loses all its transitions.
    """
    limits = limits or Limits()
    rem = _removable(a)
    if len(rem) > limits.max_subset_search:
        raise ResourceLimitError(
            f"{len(rem)} removable transitions exceed the subset-search bound {limits.max_subset_search}",
            {"removable": len(rem), "bound": limits.max_subset_search},
        )
    count = defaultdict(int)
    for t in a.transitions:
        count[(t.src, t.letter)] += 1
    seen = set()
    for k in range(len(rem) + 1):
        for drop in itertools.combinations(rem, k):
            lost = defaultdict(int)
            for t in drop:
                lost[(t.src, t.letter)] += 1
            if any(lost[g] >= count[g] for g in lost):
                continue
            dropped = set(drop)
            b = a.subautomaton(t for t in a.transitions if t not in dropped)
            key = b.transitions
            if key in seen:
                continue
            seen.add(key)
            yield b


@dataclass(frozen=True)
class SubautomatonVerdict:
    holds: bool
    certificate: Optional[ParityAutomaton] = None
    examined: int = 0

    def __bool__(self) -> bool:
        return self.holds


def is_pre_sd(a: ParityAutomaton, limits: Optional[Limits] = None) -> SubautomatonVerdict:
    """Search for a language-equivalent SD subautomaton."""
    n = 0
    budget = budget_for(limits)
    for b in subautomata(a, limits):
        n += 1
        budget.check()
        if not is_semantically_deterministic(b, limits, budget):
            continue
        if b.transitions == a.trim().transitions or contains(a, b, budget=budget):
            return SubautomatonVerdict(True, b, n)
    return SubautomatonVerdict(False, None, n)


# ---------------------------------------------------------------------------
# memoryless adversarial resolvability


def adam_two_token_wins(colors: tuple) -> bool:
    return not two_token_eve_wins(colors)


def two_token_mdp(
    a: ParityAutomaton, b: ParityAutomaton, weights: Optional[Callable] = None,
    limits: Optional[Limits] = None,
) -> tuple:
    """G2(b;a) with Eve's vertices made stochastic; returns (mdp, dag, initial)."""
    g = build_two_token_game(b, a, limits)
    dag = zielonka_dag(g.objective.dag.colors, max_vector_predicate(adam_two_token_wins), vector=True)
    prob = {}
    for v in g.vertices:
        if g.owner[v] == ADAM:
            continue
        out = g.out(v)
        ws = [Fraction(weights(e) if weights else 1) for e in out]
        total = sum(ws)
        for e, w in zip(out, ws):
            prob[e] = w / total
    controlled = [v for v in g.vertices if g.owner[v] == ADAM]
    m = Mdp(vertices=g.vertices, controlled=controlled, edges=g.edges, prob=prob, colors=dag.colors)
    return m, dag, g.initial


def check_ma_certificate(
    a: ParityAutomaton, b: ParityAutomaton, weights: Optional[Callable] = None,
    limits: Optional[Limits] = None,
) -> bool:
    """Does choosing uniformly among b's transitions resolve a against every word?

    ``weights`` optionally replaces the uniform choice by positive weights
    per arena edge.
    """
    if b.initial != a.initial:
        raise InputError("certificate must share the initial state")
    a.subautomaton(b.transitions)
    m, dag, init = two_token_mdp(a, b, weights, limits)
    return init not in positive_muller(m, dag)


def is_ma(a: ParityAutomaton, limits: Optional[Limits] = None) -> SubautomatonVerdict:
    n = 0
    budget = budget_for(limits)
    for b in subautomata(a, limits):
        n += 1
        budget.check()
        if check_ma_certificate(a, b, limits=limits):
            return SubautomatonVerdict(True, b, n)
    return SubautomatonVerdict(False, None, n)


# ---------------------------------------------------------------------------
# dispatcher


def _short_lassos(a: ParityAutomaton, max_len: int = 3, limit: int = 4) -> list:
    out = []
    letters = list(a.alphabet)
    for total in range(1, max_len + 1):
        for plen in range(total):
            for pre in itertools.product(letters, repeat=plen):
                for per in itertools.product(letters, repeat=total - plen):
                    w = LassoWord(pre, per)
                    if lasso_membership(a, w):
                        out.append(w)
                        if len(out) >= limit:
                            return out
    return out


def uniform_evidence(a: ParityAutomaton) -> list:
    """Uniform-resolver acceptance probabilities on a few short accepted lassos."""
    prod = resolver_product(uniform_resolver(a), a)
    return [(str(w), lasso_acceptance_probability(prod, w).value) for w in _short_lassos(a)]


def _try(report: ClassificationReport, cls: str, fn, note: str):
    try:
        value = fn()
    except ResourceLimitError as exc:
        report.set(cls, UNKNOWN, f"resource bound hit: {exc}")
        return None
    report.set(cls, bool(value), note)
    return value


def classify(a: ParityAutomaton, limits: Optional[Limits] = None) -> ClassificationReport:
    kind = classify_acceptance(a)
    rep = ClassificationReport(kind)
    sd = _try(rep, "SD", lambda: is_semantically_deterministic(a, limits), "direct check of every reachable choice")
    if sd is not None and not sd.holds:
        q, x, p, r, w = sd.witness
        rep.evidence["SD"] = {"state": q, "letter": x, "successors": [p, r], "lasso": str(w)}
    hd = _try(rep, "HD", lambda: is_history_deterministic(a, limits), "2-token game")
    if kind == AcceptanceClass.SAFETY:
        note = "safety: all resolver classes coincide with HD"
        if hd is not None:
            for cls in ("preSD", "MA", "SR", "MR"):
                rep.set(cls, rep.verdicts["HD"], note)
    elif kind in (AcceptanceClass.REACHABILITY, AcceptanceClass.WEAK):
        if hd is not None:
            rep.set("MA", rep.verdicts["HD"], "reachability/weak: MA coincides with HD")
        pre = _try(rep, "preSD", lambda: is_pre_sd(a, limits), "subset search for an SD subautomaton")
        if pre is not None:
            if pre.certificate is not None:
                rep.evidence["preSD_subautomaton_transitions"] = len(pre.certificate.transitions)
            note = "reachability/weak: SR and MR coincide with pre-SD (stated for SD weak automata)"
            rep.set("SR", rep.verdicts["preSD"], note)
            rep.set("MR", rep.verdicts["preSD"], note)
    else:
        ma = _try(rep, "MA", lambda: is_ma(a, limits), "subset search with the randomised 2-token MDP")
        if ma is not None and ma.certificate is not None:
            rep.evidence["MA_certificate_transitions"] = len(ma.certificate.transitions)
        v = rep.verdicts
        if v["SD"] == YES:
            rep.set("preSD", YES, "SD automata are pre-SD")
        elif v["HD"] == YES:
            rep.set("preSD", YES, "HD implies SR implies pre-SD")
        else:
            pre = _try(rep, "preSD", lambda: is_pre_sd(a, limits), "subset search for an SD subautomaton")
            if pre is not None and pre.certificate is not None:
                rep.evidence["preSD_subautomaton_transitions"] = len(pre.certificate.transitions)
        if v["MA"] == YES:
            rep.set("MR", YES, "MA implies MR")
        if v["HD"] == YES or v["MR"] == YES:
            rep.set("SR", YES, "HD or MR implies SR")
        if v["preSD"] == NO:
            rep.set("SR", NO, "SR implies pre-SD")
            rep.set("MR", NO, "MR implies SR")
        for cls in ("SR", "MR"):
            if cls not in rep.notes:
                rep.notes[cls] = "no decision procedure is known for this acceptance class"
        try:
            rep.evidence["uniform"] = uniform_evidence(a)
        except ResolvabilityError:
            pass
    rep.check_lattice()
    return rep


# ---------------------------------------------------------------------------
# SR coBüchi to MA


@dataclass(frozen=True)
class SrToMaResult:
    h: ParityAutomaton
    certificate: ParityAutomaton
    safe_deterministic: tuple
    notes: tuple = ()


def sr_cobuchi_to_ma(
    c: ParityAutomaton, limits: Optional[Limits] = None, verify: bool = True,
) -> SrToMaResult:
    """Turn a coBüchi automaton assumed SR into an MA one of no larger size."""
    if c.bounds != (0, 1):
        raise InputError("sr_cobuchi_to_ma needs a coBüchi automaton")
    notes = []
    red = priority_reduce(c)
    safe = safe_approximation(red)
    reach = red.reachable_states()
    safe_det = [p for p in reach if is_history_deterministic(safe.with_initial(p), limits)]
    sd_set = set(safe_det)
    if not safe_det:
        raise InputError("SR assumption false: no safe-deterministic state")
    budget = budget_for(limits)

    def safe_contains(p, q) -> bool:
        return p == q or contains(safe.with_initial(p), safe.with_initial(q), budget=budget).holds

    classes = weak_coreachability(c)
    cls_of = {q: k for k, cl in enumerate(classes) for q in cl}
    ts = []
    for p in safe_det:
        for x in red.alphabet:
            zero = sorted((t for t in red.delta(p, x) if t.priority == 0), key=transition_key)
            pick = None
            for t in zero:
                if t.dst in sd_set and all(safe_contains(o.dst, t.dst) for o in zero):
                    pick = t
                    break
            if pick is not None:
                ts.append(pick)
                continue
            if zero:
                notes.append(f"no language-maximal safe choice at ({p}, {x}); using jumps")
            targets = {q for t in red.delta(p, x) for q in classes[cls_of[t.dst]] if q in sd_set}
            if not targets:
                raise InputError(
                    f"SR assumption false: no safe-deterministic state weakly coreachable to a {x}-successor of {p}"
                )
            ts.extend(Transition(p, x, 1, q) for q in sorted(targets, key=str))
    if c.initial in sd_set:
        init = c.initial
    else:
        cands = sorted((q for q in classes[cls_of[c.initial]] if q in sd_set), key=str)
        if not cands:
            raise InputError("SR assumption false: no safe-deterministic state weakly coreachable to the initial state")
        init = cands[0]
        notes.append(f"initial state moved to {init}")
    h = ParityAutomaton(
        states=safe_det, alphabet=c.alphabet, initial=init, transitions=ts, bounds=(0, 1),
        name=f"{c.name}_ma",
    ).trim()
    cert_ts = []
    for q in h.states:
        for x in h.alphabet:
            opts = h.delta(q, x)
            zero = [t for t in opts if t.priority == 0]
            cert_ts.extend(zero[:1] if zero else opts)
    cert = h.subautomaton(cert_ts)
    res = SrToMaResult(h, cert, tuple(safe_det), tuple(notes))
    if verify:
        if len(h.states) > len(c.states):
            raise OracleMismatch("conversion grew the automaton")
        if not equivalent(h, c, limits):
            raise OracleMismatch("converted automaton is not language-equivalent")
        if not check_ma_certificate(h, cert, limits=limits):
            raise OracleMismatch("certificate subautomaton failed the MA check")
    return res
