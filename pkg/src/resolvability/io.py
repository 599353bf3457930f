"""Line-oriented text formats.

Every document starts with a keyword line naming its kind (``automaton``,
``resolver``, ``mdp``, ``game2d`` or ``pfa``).  Tokens are separated by
whitespace, and lines whose first non-blank character is ``#`` are
comments.  Probabilities are written ``num/den``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

from .automata import (
    LassoWord,
    ParityAutomaton,
    ProbabilisticParityAutomaton,
    Resolver,
    Transition,
    canon_key,
    sorted_canon,
)
from .errors import InputError, ParseError
from .gadgets import Pfa, TwoDimParityGame
from .games import ADAM, EVE, Edge, edge_key
from .mdp import Mdp

BLANK = "-"


@dataclass(frozen=True)
class Line:
    number: int
    tokens: tuple

    @property
    def key(self) -> str:
        return self.tokens[0]

    def args(self, n: Optional[int] = None, at_least: Optional[int] = None) -> tuple:
        rest = self.tokens[1:]
        if n is not None and len(rest) != n:
            raise ParseError(f"'{self.key}' expects {n} arguments, got {len(rest)}", self.number, 1)
        if at_least is not None and len(rest) < at_least:
            raise ParseError(f"'{self.key}' expects at least {at_least} arguments", self.number, 1)
        return rest


def _lines(text: str) -> list:
    out = []
    for i, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        out.append(Line(i, tuple(s.split())))
    if not out:
        raise ParseError("empty document")
    return out


def _fraction(tok: str, line: Line) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad rational {tok!r}", line.number, _column(line, tok))


def _int(tok: str, line: Line) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"bad integer {tok!r}", line.number, _column(line, tok))


def _column(line: Line, tok: str) -> int:
    return 1 + sum(len(t) + 1 for t in line.tokens[: line.tokens.index(tok)]) if tok in line.tokens else 1


def fmt_fraction(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _name(x) -> str:
    s = str(x)
    if not s or any(c.isspace() for c in s):
        raise InputError(f"name {s!r} cannot be written in a document")
    return s


def _names(xs: Iterable) -> list:
    out = [_name(x) for x in xs]
    if len(set(out)) != len(out):
        raise InputError("distinct names collide when written as text")
    return out


class _Header:
    """Collects single-occurrence header lines."""

    def __init__(self, kind: str, lines: list):
        first = lines[0]
        if first.key != kind:
            raise ParseError(f"expected a '{kind}' document, found '{first.key}'", first.number, 1)
        self.name = " ".join(first.args(at_least=0)) or kind
        self.fields: dict = {}
        self.body: list = []
        self.first = first
        for ln in lines[1:]:
            self.body.append(ln)

    def take(self, key: str, required: bool = True) -> Optional[Line]:
        found = [ln for ln in self.body if ln.key == key]
        if len(found) > 1:
            raise ParseError(f"duplicate '{key}' line", found[1].number, 1)
        if not found:
            if required:
                raise ParseError(f"missing '{key}' line", self.first.number, 1)
            return None
        return found[0]

    def rest(self, allowed: set) -> list:
        out = []
        for ln in self.body:
            if ln.key not in allowed:
                raise ParseError(f"unexpected keyword '{ln.key}'", ln.number, 1)
            out.append(ln)
        return out


def _semantic(exc: InputError, line: Line) -> ParseError:
    return ParseError(f"{exc}", line.number, 1)


# ---------------------------------------------------------------------------
# automata


AUTOMATON_KEYS = {"alphabet", "states", "initial", "bounds", "t", "p"}


def parse_automaton(text: str) -> ParityAutomaton:
    """Parse an automaton document; ``p`` lines make it probabilistic."""
    h = _Header("automaton", _lines(text))
    body = h.rest(AUTOMATON_KEYS)
    alphabet = h.take("alphabet").args(at_least=1)
    states = h.take("states").args(at_least=1)
    init_line = h.take("initial")
    (initial,) = init_line.args(1)
    bl = h.take("bounds")
    lo, hi = (_int(x, bl) for x in bl.args(2))
    ts, rho = [], {}
    kinds = set()
    for ln in body:
        if ln.key == "t":
            src, x, pr, dst = ln.args(4)
            ts.append(Transition(src, x, _int(pr, ln), dst))
        elif ln.key == "p":
            src, x, pr, dst, w = ln.args(5)
            t = Transition(src, x, _int(pr, ln), dst)
            if t in rho:
                raise ParseError(f"duplicate probability for {t}", ln.number, 1)
            ts.append(t)
            rho[t] = _fraction(w, ln)
        else:
            continue
        kinds.add(ln.key)
    if len(kinds) > 1:
        raise ParseError("a document uses either 't' or 'p' transition lines, not both", h.first.number, 1)
    for seq, what in ((alphabet, "letter"), (states, "state")):
        if len(set(seq)) != len(seq):
            raise ParseError(f"repeated {what} name", h.first.number, 1)
    try:
        if "p" in kinds:
            return ProbabilisticParityAutomaton(
                states=states, alphabet=alphabet, initial=initial, transitions=ts,
                bounds=(lo, hi), name=h.name, rho=rho,
            )
        return ParityAutomaton(
            states=states, alphabet=alphabet, initial=initial, transitions=ts, bounds=(lo, hi), name=h.name,
        )
    except ParseError:
        raise
    except InputError as exc:
        raise _semantic(exc, h.first)


def serialize_automaton(a: ParityAutomaton) -> str:
    lines = [
        f"automaton {_name(a.name)}",
        "alphabet " + " ".join(_names(a.alphabet)),
        "states " + " ".join(_names(a.states)),
        f"initial {_name(a.initial)}",
        f"bounds {a.bounds[0]} {a.bounds[1]}",
    ]
    prob = isinstance(a, ProbabilisticParityAutomaton)
    for t in a.transitions:
        row = f"{_name(t.src)} {_name(t.letter)} {t.priority} {_name(t.dst)}"
        lines.append(f"p {row} {fmt_fraction(a.prob(t))}" if prob else f"t {row}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# resolvers (transition references are indices into a.transitions)


def parse_resolver(text: str, a: ParityAutomaton) -> Resolver:
    h = _Header("resolver", _lines(text))
    body = h.rest({"memory", "init", "move", "update"})
    memory = h.take("memory").args(at_least=1)
    (init,) = h.take("init").args(1)

    def ref(tok, ln):
        if not tok.startswith("t"):
            raise ParseError(f"transition reference must look like t<k>, got {tok!r}", ln.number, _column(ln, tok))
        k = _int(tok[1:], ln)
        if not 0 <= k < len(a.transitions):
            raise ParseError(f"transition reference {tok} out of range", ln.number, _column(ln, tok))
        return a.transitions[k]

    moves: dict = {}
    update: dict = {}
    for ln in body:
        if ln.key == "move":
            m, q, x, tok, w = ln.args(5)
            t = ref(tok, ln)
            if t.src != q or t.letter != x:
                raise ParseError(f"{tok} does not leave {q} on {x}", ln.number, _column(ln, tok))
            moves.setdefault((m, q, x), {})[t] = _fraction(w, ln)
        elif ln.key == "update":
            m, tok, m2 = ln.args(3)
            update[(m, ref(tok, ln))] = m2
    try:
        r = Resolver(memory=memory, initial=init, moves=moves, update=update, name=h.name)
        r.validate_for(a)
    except InputError as exc:
        raise _semantic(exc, h.first)
    return r


def serialize_resolver(r: Resolver, a: ParityAutomaton) -> str:
    index = {t: k for k, t in enumerate(a.transitions)}
    lines = [
        f"resolver {_name(r.name)}",
        "memory " + " ".join(_names(r.memory)),
        f"init {_name(r.initial)}",
    ]
    moves = sorted(
        (canon_key(m), canon_key(q), canon_key(x), index[t], m, q, x, w)
        for (m, q, x), dist in r.moves.items() for t, w in dist.items()
    )
    for *_, k, m, q, x, w in moves:
        lines.append(f"move {_name(m)} {_name(q)} {_name(x)} t{k} {fmt_fraction(w)}")
    for _, k, m, m2 in sorted((canon_key(m), index[t], m, m2) for (m, t), m2 in r.update.items()):
        lines.append(f"update {_name(m)} t{k} {_name(m2)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# lassos


def parse_lasso(text: str) -> LassoWord:
    """``u$v`` or ``u|v`` means u·v^ω.

    Without whitespace every character is a letter; with whitespace the
    tokens are letters.  ``|`` takes precedence as separator so that ``$``
    can be a letter.
    """
    s = text.strip()
    tokens = s.split() if any(c.isspace() for c in s) else list(s)
    sep = "|" if "|" in tokens else "$"
    if sep not in tokens:
        raise ParseError(f"lasso {text!r} has no '$' or '|' separator")
    k = tokens.index(sep)
    pre, per = tokens[:k], tokens[k + 1:]
    if "|" in per:
        raise ParseError(f"lasso {text!r} has several separators")
    if not per:
        raise ParseError(f"lasso {text!r} has an empty period")
    return LassoWord(tuple(pre), tuple(per))


def serialize_lasso(w: LassoWord) -> str:
    return str(w)


# ---------------------------------------------------------------------------
# MDPs


def parse_mdp(text: str) -> Mdp:
    h = _Header("mdp", _lines(text))
    body = h.rest({"vertices", "controlled", "colors", "e"})
    vertices = h.take("vertices").args(at_least=1)
    cl = h.take("controlled", required=False)
    controlled = cl.args() if cl else ()
    col = h.take("colors", required=False)
    colors = set(col.args()) if col else None
    edges, prob = [], {}
    for ln in body:
        if ln.key != "e":
            continue
        args = ln.args()
        if len(args) not in (3, 4):
            raise ParseError("'e' expects <src> <dst> <color|-> [<num>/<den>]", ln.number, 1)
        src, dst, c = args[:3]
        e = Edge(src, dst, None if c == BLANK else c)
        if e in prob or e in edges:
            raise ParseError(f"duplicate edge {src} {dst} {c}", ln.number, 1)
        edges.append(e)
        if len(args) == 4:
            prob[e] = _fraction(args[3], ln)
    try:
        return Mdp(vertices=vertices, controlled=controlled, edges=edges, prob=prob, colors=colors)
    except InputError as exc:
        raise _semantic(exc, h.first)


def serialize_mdp(m: Mdp, name: str = "mdp") -> str:
    lines = [
        f"mdp {_name(name)}",
        "vertices " + " ".join(_names(m.vertices)),
        "controlled " + " ".join(_names(sorted_canon(m.controlled))),
        "colors " + " ".join(_names(sorted_canon(m.colors))),
    ]
    for e in sorted(m.edges, key=edge_key):
        row = f"e {_name(e.src)} {_name(e.dst)} {BLANK if e.color is None else _name(e.color)}"
        if e.src not in m.controlled:
            row += f" {fmt_fraction(m.prob[e])}"
        lines.append(row)
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# 2-D games and PFAs


def parse_game2d(text: str) -> TwoDimParityGame:
    h = _Header("game2d", _lines(text))
    body = h.rest({"vertices", "eve", "initial", "e"})
    vertices = h.take("vertices").args(at_least=1)
    ev = h.take("eve", required=False)
    eve = set(ev.args()) if ev else set()
    (initial,) = h.take("initial").args(1)
    edges = []
    for ln in body:
        if ln.key == "e":
            name, src, dst, f, s = ln.args(5)
            edges.append((name, src, dst, _int(f, ln), _int(s, ln)))
    owner = {v: EVE if v in eve else ADAM for v in vertices}
    try:
        return TwoDimParityGame(vertices, owner, edges, initial)
    except InputError as exc:
        raise _semantic(exc, h.first)


def serialize_game2d(g: TwoDimParityGame, name: str = "game") -> str:
    lines = [
        f"game2d {_name(name)}",
        "vertices " + " ".join(_names(g.vertices)),
        "eve " + " ".join(_names(v for v in g.vertices if g.owner[v] == EVE)),
        f"initial {_name(g.initial)}",
    ]
    for e in sorted(g.edges, key=lambda e: canon_key(e.name)):
        lines.append(f"e {_name(e.name)} {_name(e.src)} {_name(e.dst)} {e.first} {e.second}")
    return "\n".join(lines) + "\n"


def parse_pfa(text: str) -> Pfa:
    h = _Header("pfa", _lines(text))
    body = h.rest({"alphabet", "states", "initial", "accepting", "p"})
    alphabet = h.take("alphabet").args(at_least=1)
    states = h.take("states").args(at_least=1)
    (initial,) = h.take("initial").args(1)
    acc = h.take("accepting", required=False)
    prob = {}
    for ln in body:
        if ln.key == "p":
            src, x, dst, w = ln.args(4)
            if (src, x, dst) in prob:
                raise ParseError(f"duplicate probability for {(src, x, dst)}", ln.number, 1)
            prob[(src, x, dst)] = _fraction(w, ln)
    try:
        return Pfa(states, alphabet, initial, frozenset(acc.args() if acc else ()), prob)
    except InputError as exc:
        raise _semantic(exc, h.first)


def serialize_pfa(p: Pfa, name: str = "pfa") -> str:
    lines = [
        f"pfa {_name(name)}",
        "alphabet " + " ".join(_names(p.alphabet)),
        "states " + " ".join(_names(p.states)),
        f"initial {_name(p.initial)}",
        "accepting " + " ".join(_names(sorted_canon(p.accepting))),
    ]
    for (q, x, r), w in sorted(p.prob.items(), key=lambda kv: canon_key(kv[0])):
        lines.append(f"p {_name(q)} {_name(x)} {_name(r)} {fmt_fraction(w)}")
    return "\n".join(lines) + "\n"


PARSERS = {
    "automaton": parse_automaton,
    "mdp": parse_mdp,
    "game2d": parse_game2d,
    "pfa": parse_pfa,
}


def document_kind(text: str) -> str:
    return _lines(text)[0].key
