"""Small graph helpers over adjacency dictionaries.

Nodes are arbitrary hashables.  ``succ`` maps a node to an iterable of
successor nodes; nodes missing from ``succ`` have no successors.
"""

from __future__ import annotations

from collections import deque
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence


def tarjan_scc(nodes: Iterable[Hashable], succ: Mapping[Hashable, Iterable[Hashable]]) -> list[list]:
    """Strongly connected components, iterative Tarjan.

    Components come out in reverse topological order (sinks first).
    """
    index: dict = {}
    low: dict = {}
    on_stack: set = set()
    stack: list = []
    out: list[list] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, iter(succ.get(root, ())))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(succ.get(w, ()))))
                    advanced = True
                    break
                if w in on_stack and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def reachable(sources: Iterable[Hashable], succ: Mapping[Hashable, Iterable[Hashable]]) -> set:
    seen = set(sources)
    todo = deque(seen)
    while todo:
        v = todo.popleft()
        for w in succ.get(v, ()):
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return seen


def reverse(succ: Mapping[Hashable, Iterable[Hashable]]) -> dict:
    pred: dict = {}
    for v, ws in succ.items():
        for w in ws:
            pred.setdefault(w, []).append(v)
    return pred


def bfs_path(
    sources: Iterable[Hashable],
    is_goal: Callable[[Hashable], bool],
    edges: Callable[[Hashable], Iterable[tuple]],
) -> Optional[tuple[Hashable, list]]:
    """Shortest path search.

    ``edges(v)`` yields ``(label, w)`` pairs.  Returns ``(goal, labels)`` for
    the first goal found (sources themselves count), or None.
    """
    parent: dict = {}
    todo = deque()
    for s in sources:
        if s not in parent:
            parent[s] = None
            todo.append(s)
    while todo:
        v = todo.popleft()
        if is_goal(v):
            labels: list = []
            cur = v
            while parent[cur] is not None:
                prev, lab = parent[cur]
                labels.append(lab)
                cur = prev
            labels.reverse()
            return v, labels
        for lab, w in edges(v):
            if w not in parent:
                parent[w] = (v, lab)
                todo.append(w)
    return None


def is_nontrivial(comp: Sequence, succ: Mapping[Hashable, Iterable[Hashable]]) -> bool:
    """True iff the component contains at least one internal edge."""
    if len(comp) > 1:
        return True
    v = comp[0]
    return any(w == v for w in succ.get(v, ()))
