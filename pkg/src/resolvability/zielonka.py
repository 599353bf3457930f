"""Zielonka DAGs: the alternating decomposition of a Muller family.

A node labelled X has as children the maximal nonempty proper subsets Y of
X whose acceptance differs from that of X.  Nodes with equal labels are
shared.

Two child generators are provided.  The generic one walks down from X
through subsets with X's acceptance, which is exact for any predicate but
exponential in |X|.  The vector one applies when colors are integer tuples
and acceptance depends only on the coordinatewise maxima of a set; then
every maximal child is the intersection of X with a box below some vector
of attained values, which makes the search polynomial.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Optional, Union

from .automata import canon_key
from .errors import InputError, ResourceLimitError

Predicate = Callable[[frozenset], bool]


def _label_key(label: frozenset):
    return (len(label), tuple(sorted(canon_key(c) for c in label)))


@dataclass(frozen=True)
class ZielonkaDag:
    colors: frozenset
    labels: tuple
    accepting: tuple
    children: tuple
    predicate: Optional[Predicate] = field(default=None, compare=False, repr=False)
    vector: bool = field(default=False, compare=False)

    root: int = 0

    @property
    def node_count(self) -> int:
        return len(self.labels)

    def index_of(self, label: frozenset) -> int:
        return self.labels.index(frozenset(label))

    def evaluate(self, colors: Iterable) -> bool:
        """Membership of a nonempty color set in F, read off the DAG."""
        s = frozenset(colors)
        if not s or not s <= self.colors:
            raise InputError("color set must be a nonempty subset of C")
        node = self.root
        while True:
            nxt = next((c for c in self.children[node] if s <= self.labels[c]), None)
            if nxt is None:
                return self.accepting[node]
            node = nxt

    def reverse_topological(self, reverse_ties: bool = False) -> list[int]:
        """Children before parents; ties broken by label order."""
        parents_left = [len(ch) for ch in self.children]
        parents_of: list[list[int]] = [[] for _ in self.labels]
        for p, ch in enumerate(self.children):
            for c in ch:
                parents_of[c].append(p)

        ranked = sorted(range(len(self.labels)), key=lambda i: _label_key(self.labels[i]))
        rank = {i: (-r if reverse_ties else r) for r, i in enumerate(ranked)}
        heap = [rank[i] for i in range(len(self.labels)) if parents_left[i] == 0]
        heapq.heapify(heap)
        by_rank = {r: i for i, r in rank.items()}
        order = []
        while heap:
            i = by_rank[heapq.heappop(heap)]
            order.append(i)
            for p in parents_of[i]:
                parents_left[p] -= 1
                if parents_left[p] == 0:
                    heapq.heappush(heap, rank[p])
        return order

    def to_nested(self) -> dict:
        """Nested JSON form (shared nodes repeated)."""

        def rec(i):
            return {
                "label": [_jsonable(c) for c in sorted(self.labels[i], key=canon_key)],
                "accepting": self.accepting[i],
                "children": [rec(c) for c in self.children[i]],
            }

        return rec(self.root)


def _jsonable(c):
    return list(c) if isinstance(c, tuple) else c


def _memo(accepting) -> Predicate:
    if callable(accepting):
        fn = accepting
    else:
        family = {frozenset(s) for s in accepting}

        def fn(s):
            return s in family

    cache: dict = {}

    def pred(s: frozenset) -> bool:
        if s not in cache:
            cache[s] = bool(fn(s))
        return cache[s]

    return pred


def _children_generic(X: frozenset, acc: Predicate) -> list[frozenset]:
    want = not acc(X)
    found = set()
    visited = {X}
    stack = [X]
    while stack:
        Z = stack.pop()
        for c in Z:
            Y = Z - {c}
            if not Y or Y in visited:
                continue
            visited.add(Y)
            if acc(Y) == want:
                found.add(Y)
            else:
                stack.append(Y)
    return [Y for Y in found if not any(Y < Z for Z in found)]


def _children_vector(X: frozenset, acc: Predicate) -> list[frozenset]:
    want = not acc(X)
    dims = len(next(iter(X)))
    values = [sorted({c[i] for c in X}) for i in range(dims)]
    found = set()
    for m in itertools.product(*values):
        Y = frozenset(c for c in X if all(c[i] <= m[i] for i in range(dims)))
        if Y and Y != X and acc(Y) == want:
            found.add(Y)
    return [Y for Y in found if not any(Y < Z for Z in found)]


def zielonka_dag(
    colors: Iterable[Hashable],
    accepting: Union[Predicate, Iterable[Iterable]],
    *,
    vector: bool = False,
    max_colors: int = 20,
) -> ZielonkaDag:
    """Build the Zielonka DAG of (C, F).

    ``accepting`` is a predicate on frozensets or an explicit family.  With
    ``vector=True`` colors must be equal-length integer tuples and the
    predicate must depend only on coordinatewise maxima.
    """
    C = frozenset(colors)
    if not C:
        raise InputError("color set must be nonempty")
    if vector:
        if len({len(c) for c in C if isinstance(c, tuple)}) != 1 or not all(isinstance(c, tuple) for c in C):
            raise InputError("vector mode needs equal-length tuple colors")
    elif len(C) > max_colors:
        raise ResourceLimitError(f"{len(C)} colors exceed the Zielonka DAG bound of {max_colors}")
    acc = _memo(accepting)
    gen = _children_vector if vector else _children_generic
    index = {C: 0}
    labels = [C]
    kids: list[list[int]] = [[]]
    todo = [C]
    while todo:
        X = todo.pop()
        i = index[X]
        ch = sorted(gen(X, acc), key=_label_key)
        for Y in ch:
            if Y not in index:
                index[Y] = len(labels)
                labels.append(Y)
                kids.append([])
                todo.append(Y)
            kids[i].append(index[Y])
    return ZielonkaDag(
        colors=C,
        labels=tuple(labels),
        accepting=tuple(acc(X) for X in labels),
        children=tuple(tuple(k) for k in kids),
        predicate=acc,
        vector=vector,
    )


def validate_dag(z: ZielonkaDag, accepting: Optional[Predicate] = None) -> None:
    """Check the structural invariants; with a predicate also maximality."""
    n = len(z.labels)
    if z.labels[z.root] != z.colors:
        raise InputError("root label must equal the color set")
    if len(set(z.labels)) != n:
        raise InputError("duplicate labels in Zielonka DAG")
    for i, ch in enumerate(z.children):
        for c in ch:
            if not (z.labels[c] < z.labels[i]) or not z.labels[c]:
                raise InputError("child label must be a nonempty proper subset of its parent")
            if z.accepting[c] == z.accepting[i]:
                raise InputError("acceptance must alternate along DAG edges")
    seen = {z.root}
    stack = [z.root]
    while stack:
        for c in z.children[stack.pop()]:
            if c not in seen:
                seen.add(c)
                stack.append(c)
    if len(seen) != n:
        raise InputError("Zielonka DAG has nodes unreachable from the root")
    acc = accepting or z.predicate
    if acc is None:
        return
    gen = _children_vector if z.vector else _children_generic
    for i, X in enumerate(z.labels):
        if bool(acc(X)) != z.accepting[i]:
            raise InputError("acceptance flag disagrees with the family")
        if set(gen(X, acc)) != {z.labels[c] for c in z.children[i]}:
            raise InputError("children are not the maximal alternating subsets")


def dag_from_nested(doc: dict) -> ZielonkaDag:
    """Rebuild a DAG from its nested JSON form, merging equal labels."""

    def lab(x):
        return tuple(x) if isinstance(x, list) else x

    index: dict = {}
    labels: list = []
    acc: list = []
    kids: list = []

    def rec(node) -> int:
        if not isinstance(node, dict) or "label" not in node:
            raise InputError("DAG node needs a 'label'")
        L = frozenset(lab(c) for c in node["label"])
        if L in index:
            return index[L]
        i = len(labels)
        index[L] = i
        labels.append(L)
        acc.append(bool(node.get("accepting", False)))
        kids.append([])
        kids[i] = [rec(c) for c in node.get("children", [])]
        return i

    rec(doc)
    z = ZielonkaDag(
        colors=labels[0], labels=tuple(labels), accepting=tuple(acc),
        children=tuple(tuple(k) for k in kids),
    )
    validate_dag(z)
    return z


def max_vector_predicate(fn: Callable[[tuple], bool]) -> Predicate:
    """Lift a predicate on coordinatewise maxima to color sets."""

    def pred(s: frozenset) -> bool:
        dims = len(next(iter(s)))
        return fn(tuple(max(c[i] for c in s) for i in range(dims)))

    return pred


def parity_family(colors: Iterable[int]) -> Predicate:
    """Max-even parity as a Muller predicate over integer colors."""
    del colors
    return lambda s: max(s) % 2 == 0
