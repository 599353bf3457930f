"""Independent brute-force oracles used by the test-suite.

None of these share code paths with the library solvers beyond the plain
data types; they are slow and only meant for small instances.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from resolvability.games import ADAM, EVE

# ---------------------------------------------------------------------------
# games


def _split_arena(g):
    """Edge-coloured arena to vertex-coloured one: every edge gets its own node."""
    owner = dict(g.owner)
    color = {v: None for v in g.vertices}
    succ = {v: [] for v in g.vertices}
    for k, e in enumerate(g.edges):
        mid = ("edge", k)
        owner[mid] = EVE
        color[mid] = e.color
        succ[mid] = [e.dst]
        succ[e.src].append(mid)
    return owner, color, succ


def _attr(sub, target, player, owner, succ):
    attr = set(target) & sub
    changed = True
    while changed:
        changed = False
        for v in sub - attr:
            nxt = [w for w in succ[v] if w in sub]
            if owner[v] == player:
                ok = any(w in attr for w in nxt)
            else:
                ok = bool(nxt) and all(w in attr for w in nxt)
            if ok:
                attr.add(v)
                changed = True
    return attr


def mcnaughton(g, accepting):
    """Winning regions of a Muller game by McNaughton's recursion.

    ``accepting`` maps a frozenset of colours to True when Eve wins.
    Returns (win_eve, win_adam) restricted to the arena's vertices.
    """
    owner, color, succ = _split_arena(g)

    def solve(sub):
        if not sub:
            return {EVE: set(), ADAM: set()}
        cols = {color[v] for v in sub if color[v] is not None}
        if not cols:
            raise AssertionError("subarena without colours")
        me = EVE if accepting(frozenset(cols)) else ADAM
        opp = ADAM if me == EVE else EVE
        for c in sorted(cols, key=repr):
            a = _attr(sub, {v for v in sub if color[v] == c}, me, owner, succ)
            r = solve(sub - a)
            if r[opp]:
                b = _attr(sub, r[opp], opp, owner, succ)
                r2 = solve(sub - b)
                return {opp: b | r2[opp], me: r2[me]}
        return {me: set(sub), opp: set()}

    res = solve(set(owner))
    vs = set(g.vertices)
    return res[EVE] & vs, res[ADAM] & vs


def parity_bruteforce(g):
    """Eve's winning region by enumerating her positional strategies.

    Against a fixed Eve strategy Adam wins from v iff he can reach a cycle
    whose maximal edge priority is odd.
    """
    eve = [v for v in g.vertices if g.owner[v] == EVE]
    choices = [g.out(v) for v in eve]
    win = set()
    for pick in itertools.product(*choices):
        chosen = dict(zip(eve, pick))
        edges = [e for e in g.edges if g.owner[e.src] == ADAM or chosen[e.src] == e]
        bad = set()
        odd = {e.color for e in edges if e.color is not None and e.color % 2 == 1}
        for p in odd:
            sub = [e for e in edges if e.color is None or e.color <= p]
            succ = {}
            for e in sub:
                succ.setdefault(e.src, set()).add(e.dst)
            for e in sub:
                if e.color == p and e.src in _reach({e.dst}, succ):
                    bad.add(e.src)
        succ_all = {}
        for e in edges:
            succ_all.setdefault(e.dst, set()).add(e.src)
        losing = _reach(bad, succ_all)
        win |= set(g.vertices) - losing
    return win


def _reach(src, succ):
    seen = set(src)
    todo = list(seen)
    while todo:
        v = todo.pop()
        for w in succ.get(v, ()):
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


# ---------------------------------------------------------------------------
# MDPs


def _solve_linear(n, rows, rhs):
    """Exact Gauss-Jordan elimination over Fractions."""
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


def chain_reach_probability(vertices, trans, target):
    """Reachability probabilities in a finite Markov chain, exactly.

    ``trans[v]`` is a list of (w, p).  Vertices that cannot reach the
    target get 0; the rest satisfy x = P x with x = 1 on the target.
    """
    back = {}
    for v in vertices:
        for w, _ in trans[v]:
            back.setdefault(w, set()).add(v)
    can = _reach(set(target), back)
    unknown = [v for v in vertices if v in can and v not in target]
    idx = {v: i for i, v in enumerate(unknown)}
    rows, rhs = [], []
    for v in unknown:
        row = [Fraction(0)] * len(unknown)
        row[idx[v]] += 1
        b = Fraction(0)
        for w, p in trans[v]:
            if w in target:
                b += p
            elif w in idx:
                row[idx[w]] -= p
        rows.append(row)
        rhs.append(b)
    sol = _solve_linear(len(unknown), rows, rhs) if unknown else []
    out = {v: Fraction(0) for v in vertices}
    for v in target:
        out[v] = Fraction(1)
    for v, x in zip(unknown, sol):
        out[v] = x
    return out


def almost_sure_reach_oracle(m, target):
    """Max over memoryless deterministic strategies of exact reach probability = 1."""
    ctrl = [v for v in m.vertices if v in m.controlled]
    outs = [m.out(v) for v in ctrl]
    best = set()
    for pick in itertools.product(*outs):
        chosen = dict(zip(ctrl, pick))
        trans = {}
        for v in m.vertices:
            if v in m.controlled:
                trans[v] = [(chosen[v].dst, Fraction(1))]
            else:
                acc = {}
                for e in m.out(v):
                    acc[e.dst] = acc.get(e.dst, 0) + m.prob[e]
                trans[v] = list(acc.items())
        pr = chain_reach_probability(m.vertices, trans, set(target))
        best |= {v for v, x in pr.items() if x == 1}
    return best


def _nonempty_subsets(xs):
    xs = list(xs)
    for r in range(1, len(xs) + 1):
        yield from itertools.combinations(xs, r)


def end_components(m):
    """All end components, as (vertex set, edge set) pairs, by enumeration."""
    found = []
    for S in _nonempty_subsets(m.vertices):
        S = set(S)
        edges = []
        ok = True
        for v in S:
            inside = [e for e in m.out(v) if e.dst in S]
            if v in m.controlled:
                if not inside:
                    ok = False
                    break
            elif len(inside) != len(m.out(v)):
                ok = False
                break
            edges.extend(inside)
        if not ok:
            continue
        succ = {}
        for e in edges:
            succ.setdefault(e.src, set()).add(e.dst)
        first = next(iter(S))
        if all(S <= _reach({v}, succ) for v in [first]) and all(first in _reach({v}, succ) for v in S):
            found.append((frozenset(S), edges))
    return found


def mec_oracle(m):
    ecs = [S for S, _ in end_components(m)]
    return {S for S in ecs if not any(S < T for T in ecs)}


def muller_ec_oracle(m, accepting):
    """Almost-sure Muller winning set via F-winning end components.

    For every vertex set S and colour subset K, keep edges coloured in K
    (or blank); S is an F-winning end component if it is an end component
    of that sub-MDP whose edges show exactly the colours K, with K in F.
    """
    colors = sorted({e.color for e in m.edges if e.color is not None}, key=repr)
    good = set()
    for K in _nonempty_subsets(colors):
        K = set(K)
        if not accepting(frozenset(K)):
            continue
        for S in _nonempty_subsets(m.vertices):
            S = set(S)
            if S <= good:
                continue
            edges = []
            ok = True
            for v in S:
                inside = [e for e in m.out(v) if e.dst in S and (e.color is None or e.color in K)]
                if v in m.controlled:
                    if not inside:
                        ok = False
                        break
                elif len(inside) != len(m.out(v)):
                    ok = False
                    break
                edges.extend(inside)
            if not ok:
                continue
            if {e.color for e in edges if e.color is not None} != K:
                continue
            succ = {}
            for e in edges:
                succ.setdefault(e.src, set()).add(e.dst)
            if all(S <= _reach({v}, succ) for v in S):
                good |= S
    return almost_sure_reach_oracle(m, good) if good else set()


def _bsccs(vertices, succ):
    comps = []
    for v in vertices:
        r = _reach({v}, succ)
        if all(v in _reach({w}, succ) for w in r):
            comp = frozenset(r)
            if comp not in comps:
                comps.append(comp)
    return comps


def muller_randomized_oracle(m, accepting):
    """(almost-sure set, positive set) over memoryless randomised strategies.

    Every controlled vertex picks a nonempty support; the induced chain's
    bottom SCCs are classified by the colours on their internal edges.
    """
    ctrl = [v for v in m.vertices if v in m.controlled]
    supports = [list(_nonempty_subsets(m.out(v))) for v in ctrl]
    a_s, pos = set(), set()
    for pick in itertools.product(*supports):
        chosen = dict(zip(ctrl, pick))
        trans, used = {}, []
        for v in m.vertices:
            if v in m.controlled:
                es = chosen[v]
                trans[v] = [(e.dst, Fraction(1, len(es))) for e in es]
                used.extend(es)
            else:
                trans[v] = [(e.dst, m.prob[e]) for e in m.out(v)]
                used.extend(m.out(v))
        succ = {v: {w for w, _ in trans[v]} for v in m.vertices}
        winning = set()
        for comp in _bsccs(m.vertices, succ):
            cols = {e.color for e in used if e.src in comp and e.dst in comp and e.color is not None}
            if cols and accepting(frozenset(cols)):
                winning |= comp
        pr = chain_reach_probability(m.vertices, trans, winning)
        a_s |= {v for v, x in pr.items() if x == 1}
        pos |= {v for v, x in pr.items() if x > 0}
    return a_s, pos


# ---------------------------------------------------------------------------
# automata


def lasso_run_search(a, w):
    """Accepting run on u·v^ω by depth-first search over simple run prefixes.

    Nodes are (state, position).  A run prefix is extended until it revisits
    a node; the closed stretch is an accepting lasso run iff its largest
    priority is even.  Depth never exceeds twice the number of nodes.
    """
    n = len(w.prefix) + len(w.period)

    def nxt(pos):
        return pos + 1 if pos + 1 < n else len(w.prefix)

    def letter(pos):
        return w.prefix[pos] if pos < len(w.prefix) else w.period[pos - len(w.prefix)]

    start = (a.initial, 0)
    path, prios, index = [start], [], {start: 0}
    bound = 3 * len(a.states) * n

    def dfs():
        q, pos = path[-1]
        if len(prios) > bound:
            raise AssertionError("run-tree depth bound exceeded")
        for t in a.transitions:
            if t.src != q or t.letter != letter(pos):
                continue
            node = (t.dst, nxt(pos))
            prios.append(t.priority)
            if node in index:
                if max(prios[index[node]:]) % 2 == 0:
                    return True
            else:
                index[node] = len(path)
                path.append(node)
                if dfs():
                    return True
                path.pop()
                del index[node]
            prios.pop()
        return False

    return dfs()


def closed_walk_maxima(d, q):
    """Set of maxima of closed walks through q, by DP over (state, running max)."""
    prios = sorted(set(d.priorities()))
    seen = set()
    todo = []
    for t in d.out(q):
        node = (t.dst, t.priority)
        if node not in seen:
            seen.add(node)
            todo.append(node)
    while todo:
        p, m = todo.pop()
        for t in d.out(p):
            node = (t.dst, max(m, t.priority))
            if node not in seen:
                seen.add(node)
                todo.append(node)
    return {m for p, m in seen if p == q and m in prios}


def has_flower_bruteforce(d, span):
    lo, hi = span
    top = max(d.priorities())
    for q in d.reachable_states():
        vals = closed_walk_maxima(d, q)
        for shift in range(-(lo // 2), top + 1):
            wanted = [2 * shift + k for k in range(lo, hi + 1)]
            if min(wanted) >= 0 and all(v in vals for v in wanted):
                return True
    return False


def subset_determinize_safety(a):
    """Deterministic safety automaton for a safety automaton (priorities 0/1, 1 only into the sink).

    Works on the language of runs that avoid priority-1 transitions: states
    are sets of states reached by such runs; the empty set is the sink.
    """
    from resolvability.automata import ParityAutomaton, Transition

    start = frozenset([a.initial])
    seen, todo, ts = {start}, [start], []
    while todo:
        S = todo.pop()
        for x in a.alphabet:
            S2 = frozenset(t.dst for q in S for t in a.delta(q, x) if t.priority == 0)
            ts.append(Transition(S, x, 0 if S2 else 1, S2))
            if S2 not in seen:
                seen.add(S2)
                todo.append(S2)
    name = {S: "{" + ",".join(sorted(map(str, S))) + "}" for S in seen}
    return ParityAutomaton(
        states=list(name.values()), alphabet=a.alphabet, initial=name[start],
        transitions=[Transition(name[t.src], t.letter, t.priority, name[t.dst]) for t in ts],
        bounds=(0, 1), name=f"det-{a.name}",
    )


def two_d_winner_bruteforce(g):
    """Eve wins a 2-D game iff some positional Eve strategy leaves Adam no cycle with f even and s odd.

    Eve's condition (f odd or s even) is a disjunction of parity
    conditions, a Rabin condition, so positional strategies suffice for her.
    """
    eve = [v for v in g.vertices if g.owner[v] == EVE]
    for pick in itertools.product(*[g.out(v) for v in eve]):
        chosen = dict(zip(eve, pick))
        es = [e for e in g.edges if g.owner[e.src] == ADAM or chosen[e.src] == e]
        succ = {}
        for e in es:
            succ.setdefault(e.src, set()).add(e.dst)
        live = _reach({g.initial}, succ)
        es = [e for e in es if e.src in live]
        if not _adam_cycle(es):
            return True
    return False


def _adam_cycle(es):
    """Is there a cycle whose max first priority is even and max second priority odd?"""
    for df in {e.first for e in es if e.first % 2 == 0}:
        for ds in {e.second for e in es if e.second % 2 == 1}:
            sub = [e for e in es if e.first <= df and e.second <= ds]
            succ = {}
            for e in sub:
                succ.setdefault(e.src, set()).add(e.dst)
            for e1 in (e for e in sub if e.first == df):
                for e2 in (e for e in sub if e.second == ds):
                    if e2.src in _reach({e1.dst}, succ) and e1.src in _reach({e2.dst}, succ):
                        return True
    return False
