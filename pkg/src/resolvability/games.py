"""Turn-based games on graphs with parity and Muller objectives.

Arenas are edge-coloured; an edge colour of ``None`` is blank and does not
count towards the set of colours seen infinitely often.  Every cycle must
carry at least one non-blank edge.

Parity games are solved by the recursive attractor algorithm after moving
edge priorities onto split vertices.  Muller games given by a Zielonka DAG
are reduced to parity games by taking the product with the Zielonka-tree
automaton of the DAG, whose states are leaves of the tree unfolding.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, NamedTuple, Optional, Union

from .automata import ParityAutomaton, canon_key, sorted_canon
from .errors import Budget, InputError, Limits, budget_for
from .graphs import tarjan_scc
from .zielonka import ZielonkaDag, max_vector_predicate, validate_dag, zielonka_dag

EVE = "eve"
ADAM = "adam"


class Edge(NamedTuple):
    src: Hashable
    dst: Hashable
    color: Any = None


def edge_key(e: Edge):
    return (canon_key(e.src), canon_key(e.dst), canon_key(e.color))


@dataclass(frozen=True)
class Parity:
    """Max-even parity over integer edge colours."""


@dataclass(frozen=True)
class Muller:
    dag: ZielonkaDag


Objective = Union[Parity, Muller]


@dataclass(frozen=True)
class GameArena:
    vertices: tuple
    owner: dict
    edges: tuple
    initial: Hashable
    objective: Objective = field(default_factory=Parity)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted_canon(self.vertices)))
        object.__setattr__(self, "edges", tuple(sorted({Edge(*e) for e in self.edges}, key=edge_key)))
        vs = set(self.vertices)
        if self.initial not in vs:
            raise InputError("initial vertex is not a vertex")
        for v in self.vertices:
            if self.owner.get(v) not in (EVE, ADAM):
                raise InputError(f"vertex {v!r} has no owner")
        has_out = set()
        for e in self.edges:
            if e.src not in vs or e.dst not in vs:
                raise InputError(f"edge {e!r} leaves the vertex set")
            has_out.add(e.src)
        dead = [v for v in self.vertices if v not in has_out]
        if dead:
            raise InputError(f"vertex {dead[0]!r} has no outgoing edge")
        blank: dict = {}
        for e in self.edges:
            if e.color is None:
                blank.setdefault(e.src, []).append(e.dst)
        for comp in tarjan_scc(self.vertices, blank):
            if len(comp) > 1 or comp[0] in blank.get(comp[0], ()):
                raise InputError("a cycle of blank edges exists")
        if isinstance(self.objective, Muller):
            used = {e.color for e in self.edges if e.color is not None}
            if not used <= self.objective.dag.colors:
                raise InputError("edge colours outside the objective's colour set")

    def out(self, v) -> list:
        return self._out.get(v, [])

    @property
    def _out(self) -> dict:
        cached = self.__dict__.get("_out_cache")
        if cached is None:
            cached = {}
            for e in self.edges:
                cached.setdefault(e.src, []).append(e)
            object.__setattr__(self, "_out_cache", cached)
        return cached

    def colors(self) -> set:
        return {e.color for e in self.edges if e.color is not None}

    @classmethod
    def explore(
        cls,
        initial: Hashable,
        owner: Callable[[Hashable], str],
        moves: Callable[[Hashable], Iterable[tuple]],
        objective: Objective,
        budget: Optional[Budget] = None,
    ) -> "GameArena":
        """Build the arena reachable from ``initial``; ``moves(v)`` yields (dst, colour)."""
        budget = budget or budget_for()
        owners = {initial: owner(initial)}
        edges = []
        todo = deque([initial])
        while todo:
            v = todo.popleft()
            budget.charge(1, "arena vertices")
            for dst, color in moves(v):
                edges.append(Edge(v, dst, color))
                if dst not in owners:
                    owners[dst] = owner(dst)
                    todo.append(dst)
        return cls(vertices=tuple(owners), owner=owners, edges=tuple(edges), initial=initial, objective=objective)


@dataclass(frozen=True)
class MemoryStrategy:
    """Finite-memory strategy as explicit tables.

    Memory starts at ``initial`` at every vertex, is updated on every
    non-blank colour by ``update[(m, colour)]`` and ``moves[(v, m)]`` gives
    the edge to take.
    """

    initial: Hashable
    update: dict
    moves: dict

    def memory_size(self) -> int:
        return len({self.initial} | set(self.update.values()))


@dataclass(frozen=True)
class SolveResult:
    win_eve: frozenset
    win_adam: frozenset
    strategy_eve: Union[dict, MemoryStrategy]
    strategy_adam: Union[dict, MemoryStrategy]

    def winner(self, v) -> str:
        return EVE if v in self.win_eve else ADAM


# ---------------------------------------------------------------------------
# vertex-priority parity games on integer vertices


class _Vgame:
    def __init__(self, owner: list, succ: list, prio: list):
        self.owner = owner  # 0 for Eve, 1 for Adam
        self.succ = succ
        self.prio = prio
        self.pred: list[list[int]] = [[] for _ in succ]
        for u, ws in enumerate(succ):
            for w in ws:
                self.pred[w].append(u)

    def attractor(self, sub: set, target: set, player: int):
        attr = set(target)
        strat = {}
        count: dict = {}
        todo = deque(attr)
        while todo:
            v = todo.popleft()
            for u in self.pred[v]:
                if u not in sub or u in attr:
                    continue
                if self.owner[u] == player:
                    attr.add(u)
                    strat[u] = v
                    todo.append(u)
                else:
                    if u not in count:
                        count[u] = sum(1 for w in self.succ[u] if w in sub)
                    count[u] -= 1
                    if count[u] == 0:
                        attr.add(u)
                        todo.append(u)
        return attr, strat

    def solve(self, sub: set):
        W = [set(), set()]
        S: list[dict] = [{}, {}]
        sub = set(sub)
        while sub:
            d = max(self.prio[v] for v in sub)
            p = d % 2
            top = {v for v in sub if self.prio[v] == d}
            A, sA = self.attractor(sub, top, p)
            Wr, Sr = self.solve(sub - A)
            if not Wr[1 - p]:
                W[p] |= sub
                S[p].update(Sr[p])
                S[p].update(sA)
                for u in top:
                    if self.owner[u] == p:
                        S[p][u] = next(w for w in self.succ[u] if w in sub)
                return W, S
            B, sB = self.attractor(sub, Wr[1 - p], 1 - p)
            W[1 - p] |= B
            S[1 - p].update(sB)
            S[1 - p].update({v: w for v, w in Sr[1 - p].items() if v in Wr[1 - p]})
            sub -= B
        return W, S


def _split(vertices: list, owner_of: Callable, out_edges: Callable, prio_of: Callable):
    """Vertex-priority game from an edge-priority one.

    Returns (game, index, back) where ``back[(i, j)]`` is the original edge
    realised by moving from integer vertex i to j.
    """
    index = {v: i for i, v in enumerate(vertices)}
    owner = [0 if owner_of(v) == EVE else 1 for v in vertices]
    prio = [0] * len(vertices)
    succ: list[list[int]] = [[] for _ in vertices]
    back: dict = {}
    for v in vertices:
        i = index[v]
        for e in out_edges(v):
            p = prio_of(e)
            j = index[e.dst]
            if p > 0:
                k = len(owner)
                owner.append(0)
                prio.append(p)
                succ.append([j])
                succ[i].append(k)
                back[(i, k)] = e
            else:
                succ[i].append(j)
                back.setdefault((i, j), e)
    return _Vgame(owner, succ, prio), index, back


def solve_parity_game(g: GameArena, budget: Optional[Budget] = None) -> SolveResult:
    """Winning regions and positional strategies of a max-even parity game."""
    if not isinstance(g.objective, Parity):
        raise InputError("solve_parity_game needs a parity objective")
    for e in g.edges:
        if e.color is not None and (not isinstance(e.color, int) or e.color < 0):
            raise InputError(f"edge {e!r} is not coloured by a priority")
    budget = budget or budget_for()
    vs = list(g.vertices)
    game, index, back = _split(vs, g.owner.get, g.out, lambda e: 0 if e.color is None else e.color)
    budget.charge(len(game.owner), "game vertices")
    W, S = game.solve(set(range(len(game.owner))))
    win = [frozenset(v for v in vs if index[v] in W[p]) for p in (0, 1)]
    strats = []
    for p in (0, 1):
        strats.append({v: back[(index[v], S[p][index[v]])]
                       for v in vs if index[v] in S[p] and game.owner[index[v]] == p and v in win[p]})
    return SolveResult(win[0], win[1], strats[0], strats[1])


# ---------------------------------------------------------------------------
# Muller games through the Zielonka-tree automaton


class ZielonkaTreeMemory:
    """Deterministic parity automaton over colours whose states are tree leaves.

    A leaf is the tuple of DAG node ids on its root path.  Reading colour c
    from leaf l picks the deepest node on l containing c; its priority is
    even iff the node is accepting and decreases with depth.  If that node
    is the leaf itself memory stays put, otherwise it moves to the leftmost
    leaf under the next child (cyclically) of that node.
    """

    def __init__(self, dag: ZielonkaDag):
        self.dag = dag
        self.height = self._height()
        self.initial = self.leftmost((dag.root,))
        self._cache: dict = {}

    def _height(self) -> int:
        memo: dict = {}

        def h(i):
            if i not in memo:
                memo[i] = 1 + max((h(c) for c in self.dag.children[i]), default=-1)
            return memo[i]

        return h(self.dag.root)

    def leftmost(self, path: tuple) -> tuple:
        while self.dag.children[path[-1]]:
            path = path + (self.dag.children[path[-1]][0],)
        return path

    def priority_at(self, depth: int, node: int) -> int:
        return 2 * (self.height - depth) + (0 if self.dag.accepting[node] else 1)

    def step(self, leaf: tuple, color) -> tuple[int, tuple]:
        key = (leaf, color)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        labels = self.dag.labels
        i = max(k for k, n in enumerate(leaf) if color in labels[n])
        node = leaf[i]
        pr = self.priority_at(i, node)
        if i == len(leaf) - 1:
            res = (pr, leaf)
        else:
            kids = self.dag.children[node]
            nxt = kids[(kids.index(leaf[i + 1]) + 1) % len(kids)]
            res = (pr, self.leftmost(leaf[: i + 1] + (nxt,)))
        self._cache[key] = res
        return res


def solve_muller_game(g: GameArena, budget: Optional[Budget] = None) -> SolveResult:
    """Winning regions of a Muller game; strategies use Zielonka-tree memory."""
    if not isinstance(g.objective, Muller):
        raise InputError("solve_muller_game needs a Muller objective")
    dag = g.objective.dag
    validate_dag(dag)
    budget = budget or budget_for()
    zt = ZielonkaTreeMemory(dag)

    def moves(pv):
        v, leaf = pv
        for e in g.out(v):
            if e.color is None:
                yield e, (e.dst, leaf), 0
            else:
                pr, nxt = zt.step(leaf, e.color)
                yield e, (e.dst, nxt), pr

    seeds = [(v, zt.initial) for v in g.vertices]
    prod_out: dict = {}
    order = []
    seen = set(seeds)
    todo = deque(seeds)
    while todo:
        pv = todo.popleft()
        order.append(pv)
        budget.charge(1, "Muller product vertices")
        lst = []
        for e, dst, pr in moves(pv):
            lst.append(Edge(pv, dst, (pr, e)))
            if dst not in seen:
                seen.add(dst)
                todo.append(dst)
        prod_out[pv] = lst

    game, index, back = _split(order, lambda pv: g.owner[pv[0]], prod_out.__getitem__, lambda e: e.color[0])
    W, S = game.solve(set(range(len(game.owner))))
    win = [frozenset(v for v in g.vertices if index[(v, zt.initial)] in W[p]) for p in (0, 1)]
    update = {}
    for pv in order:
        for e in prod_out[pv]:
            c = e.color[1].color
            if c is not None:
                update[(pv[1], c)] = e.dst[1]
    strats = []
    for p in (0, 1):
        mv = {}
        for pv in order:
            i = index[pv]
            if game.owner[i] == p and i in W[p] and i in S[p]:
                mv[pv] = back[(i, S[p][i])].color[1]
        strats.append(MemoryStrategy(initial=zt.initial, update=update, moves=mv))
    return SolveResult(win[0], win[1], strats[0], strats[1])


def solve_game(g: GameArena, budget: Optional[Budget] = None) -> SolveResult:
    if isinstance(g.objective, Muller):
        return solve_muller_game(g, budget)
    return solve_parity_game(g, budget)


# ---------------------------------------------------------------------------
# games derived from automata


def _same_alphabet(a: ParityAutomaton, b: ParityAutomaton) -> None:
    if set(a.alphabet) != set(b.alphabet):
        raise InputError("automata have different alphabets")


def two_token_eve_wins(colors: tuple) -> bool:
    """Eve's side of the 2-token condition on coordinatewise maxima."""
    ce, c1, c2 = colors
    return ce % 2 == 0 or (c1 % 2 == 1 and c2 % 2 == 1)


def _triples(b: ParityAutomaton, a: ParityAutomaton) -> list:
    pb, pa = sorted(b.priorities()), sorted(a.priorities())
    return [(x, y, z) for x in pb for y in pa for z in pa]


def two_token_dag(b: ParityAutomaton, a: ParityAutomaton, eve: bool = True) -> ZielonkaDag:
    fn = two_token_eve_wins if eve else (lambda t: not two_token_eve_wins(t))
    return zielonka_dag(_triples(b, a), max_vector_predicate(fn), vector=True)


def build_two_token_game(
    b: ParityAutomaton, a: ParityAutomaton, limits: Optional[Limits] = None,
    budget: Optional[Budget] = None,
) -> GameArena:
    """The 2-token game: Eve builds one run in b, Adam two runs in a.

    Vertices: ('R', e, p1, p2) Adam picks a letter; ('L', e, p1, p2, x) Eve
    picks a b-transition; ('T', e', p1, p2, x, ce) Adam picks two
    a-transitions, and that edge is coloured (ce, c1, c2).
    """
    _same_alphabet(a, b)
    budget = budget or budget_for(limits)

    def owner(v):
        return EVE if v[0] == "L" else ADAM

    def moves(v):
        if v[0] == "R":
            _, e, p1, p2 = v
            for x in a.alphabet:
                yield ("L", e, p1, p2, x), None
        elif v[0] == "L":
            _, e, p1, p2, x = v
            for t in b.delta(e, x):
                yield ("T", t.dst, p1, p2, x, t.priority), None
        else:
            _, e, p1, p2, x, ce = v
            for t1 in a.delta(p1, x):
                for t2 in a.delta(p2, x):
                    yield ("R", e, t1.dst, t2.dst), (ce, t1.priority, t2.priority)

    init = ("R", b.initial, a.initial, a.initial)
    return GameArena.explore(init, owner, moves, Muller(two_token_dag(b, a)), budget)


@dataclass(frozen=True)
class HdVerdict:
    holds: bool
    certificate: Optional[SolveResult] = None
    arena_size: int = 0

    def __bool__(self) -> bool:
        return self.holds


def is_history_deterministic(
    a: ParityAutomaton, limits: Optional[Limits] = None, budget: Optional[Budget] = None,
) -> HdVerdict:
    """HD test: Eve wins the 2-token game of a against itself."""
    g = build_two_token_game(a, a, limits, budget)
    res = solve_muller_game(g, budget or budget_for(limits))
    win = g.initial in res.win_eve
    return HdVerdict(win, res if win else None, len(g.vertices))


def simulation_eve_wins(colors: tuple) -> bool:
    ca, cb = colors
    return ca % 2 == 1 or cb % 2 == 0


def build_simulation_game(
    a: ParityAutomaton, b: ParityAutomaton, limits: Optional[Limits] = None,
    budget: Optional[Budget] = None,
) -> GameArena:
    """Simulation game of a by b: Adam moves in a, Eve answers in b."""
    _same_alphabet(a, b)
    budget = budget or budget_for(limits)
    pairs = [(x, y) for x in sorted(a.priorities()) for y in sorted(b.priorities())]
    dag = zielonka_dag(pairs, max_vector_predicate(simulation_eve_wins), vector=True)

    def owner(v):
        return ADAM if v[0] == "A" else EVE

    def moves(v):
        if v[0] == "A":
            _, pa, pb = v
            for t in a.out(pa):
                yield ("E", t.dst, pb, t.letter, t.priority), None
        else:
            _, pa, pb, x, ca = v
            for t in b.delta(pb, x):
                yield ("A", pa, t.dst), (ca, t.priority)

    return GameArena.explore(("A", a.initial, b.initial), owner, moves, Muller(dag), budget)


def solve_simulation(
    a: ParityAutomaton, b: ParityAutomaton, limits: Optional[Limits] = None,
) -> bool:
    """True iff b simulates a."""
    g = build_simulation_game(a, b, limits)
    return g.initial in solve_muller_game(g, budget_for(limits)).win_eve
