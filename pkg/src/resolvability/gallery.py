"""Named fixture automata.

Priorities follow the drawings: in coBüchi figures solid edges have
priority 0 and dashed edges priority 1; in Büchi figures double edges have
priority 2 and all others priority 1.  Missing transitions go to a
rejecting sink called ``sink``.
"""

from __future__ import annotations

from typing import Optional, Sequence

from .automata import ParityAutomaton, Resolver, complete_with_sink, uniform_resolver
from .errors import InputError

DIAMOND = "◇"

FIXTURES = (
    "fig1a-reach",
    "fig1b-cobuchi",
    "fig3-cobuchi-sd",
    "fig4-hd-cobuchi",
    "fig5-buchi-sd",
    "fig6-hd-buchi",
    "fig7-mr-buchi",
    "parity-lang",
)


def _edges(spec):
    """Expand ``(src, letters, prio, dst)`` rows with multi-letter strings."""
    out = []
    for src, letters, prio, dst in spec:
        for x in (letters if isinstance(letters, (list, tuple)) else letters.split(",")):
            out.append((src, x, prio, dst))
    return out


def fig1a() -> ParityAutomaton:
    ts = _edges([
        ("q0", "a,b", 1, "q_a"),
        ("q0", "a,b", 1, "q_b"),
        ("q_a", "b", 1, "q0"),
        ("q_b", "a", 1, "q0"),
        ("q_a", "a", 1, "q_f"),
        ("q_b", "b", 1, "q_f"),
        ("q_f", "a,b", 2, "q_f"),
    ])
    return ParityAutomaton(
        states=["q0", "q_a", "q_b", "q_f"], alphabet=["a", "b"], initial="q0",
        transitions=ts, bounds=(1, 2), name="fig1a-reach",
    )


def fig1b() -> ParityAutomaton:
    ts = _edges([
        ("s", "swap", 0, "s"),
        ("s", "same,up", 0, "s_up"),
        ("s", "same,down", 0, "s_down"),
        ("s_up", "same,up", 0, "s_up"),
        ("s_up", "swap", 0, "s_down"),
        ("s_up", "down", 1, "s"),
        ("s_down", "same,down", 0, "s_down"),
        ("s_down", "swap", 0, "s_up"),
        ("s_down", "up", 1, "s"),
    ])
    return ParityAutomaton(
        states=["s", "s_up", "s_down"], alphabet=["swap", "same", "up", "down"],
        initial="s", transitions=ts, bounds=(0, 1), name="fig1b-cobuchi",
    )


def fig3() -> ParityAutomaton:
    ts = _edges([
        ("q0", "a,b", 0, "q_a"),
        ("q0", "a,b", 0, "q_b"),
        ("q_a", "a", 0, "q0"),
        ("q_a", "b", 1, "q0"),
        ("q_b", "b", 0, "q0"),
        ("q_b", "a", 1, "q0"),
    ])
    return ParityAutomaton(
        states=["q0", "q_a", "q_b"], alphabet=["a", "b"], initial="q0",
        transitions=ts, bounds=(0, 1), name="fig3-cobuchi-sd",
    )


def fig4() -> ParityAutomaton:
    ts = _edges([
        ("q0", "x", 0, "q0"),
        ("q0", "x", 0, "q1"),
        ("q0", "b", 1, "q0"),
        ("q0", "a", 0, "d1"),
        ("q1", "x", 0, "q1"),
        ("q1", "a", 1, "q0"),
        ("q1", "b", 0, "d2"),
        ("d1", "x,a", 0, "d1"),
        ("d1", "b", 1, "d2"),
        ("d2", "b", 1, "d2"),
        ("d2", "a", 1, "d1"),
        ("d2", "x", 0, "d3"),
        ("d3", "x", 0, "d3"),
        ("d3", "b", 0, "d2"),
        ("d3", "a", 1, "d1"),
    ])
    return ParityAutomaton(
        states=["q0", "q1", "d1", "d2", "d3"], alphabet=["x", "a", "b"], initial="q0",
        transitions=ts, bounds=(0, 1), name="fig4-hd-cobuchi",
    )


def fig5() -> ParityAutomaton:
    ts = _edges([
        ("q0", "x", 1, "q_a"),
        ("q0", "x", 1, "q_b"),
        ("q_a", "a", 1, "q_r"),
        ("q_b", "b", 1, "q_r"),
        ("q_r", "z", 2, "q0"),
        ("q_r", "y", 1, "q0"),
        ("q_a", "b", 1, "l1"),
        ("q_b", "a", 1, "l1"),
        ("l1", "z", 1, "q0"),
        ("l1", "y", 1, "l2"),
        ("l2", "x", 1, "l3"),
        ("l3", "a,b", 1, "l1"),
    ])
    alphabet = ["x", "y", "z", "a", "b"]
    states, ts = complete_with_sink(["q0", "q_a", "q_b", "q_r", "l1", "l2", "l3"], alphabet, ts)
    return ParityAutomaton(
        states=states, alphabet=alphabet, initial="q0", transitions=ts, bounds=(1, 2),
        name="fig5-buchi-sd",
    )


def _fig6_part(color: str, accept_c: int, accept_ac: int, accept_ab: int):
    x0 = f"q_{color}"
    xc, xa, xac, xab = (f"{color}_{s}" for s in ("c", "a", "ac", "ab"))
    d = DIAMOND
    rows = [
        (x0, ["b", d], 1, x0),
        (x0, ["a"], 1, xa),
        (x0, ["c"], 1, xc),
        (xc, ["c"], 1, xc),
        (xc, ["a"], 1, xa),
        # (xc, b) is not drawn; reading b after c resets the pattern
        (xc, ["b"], 1, x0),
        (xc, [d], accept_c, "q_R"),
        (xa, [d], 1, x0),
        (xa, ["c"], 1, xac),
        (xa, ["b"], 1, xab),
        (xa, ["a"], 1, xa),
        (xac, ["c"], 1, xac),
        (xac, ["a"], 1, xa),
        (xac, ["b"], 1, xab),
        (xac, [d], accept_ac, "q_R"),
        (xab, ["a"], 1, xa),
        (xab, ["c"], 1, xac),
        (xab, ["b"], 1, xab),
        (xab, [d], accept_ab, "q_B"),
    ]
    return [x0, xc, xa, xac, xab], _edges(rows)


def fig6() -> ParityAutomaton:
    d = DIAMOND
    top = _edges([
        ("t0", ["a", "b", d], 1, "t0"),
        ("t0", ["a"], 1, "t_a"),
        ("t0", ["c"], 1, "t_c"),
        ("t_a", [d], 1, "t0"),
        ("t_a", ["a", "c"], 1, "t_a"),
        ("t_a", ["b"], 1, "t_b"),
        ("t_c", ["c"], 1, "t_c"),
        ("t_c", ["a", "b"], 1, "t0"),
        ("t_c", [d], 1, "q_R"),
        ("t_b", ["b"], 1, "t_b"),
        ("t_b", ["c", "a"], 1, "t_a"),
        ("t_b", [d], 1, "q_B"),
    ])
    red_states, red = _fig6_part("R", 2, 2, 1)
    blue_states, blue = _fig6_part("B", 1, 1, 2)
    return ParityAutomaton(
        states=["t0", "t_a", "t_b", "t_c"] + red_states + blue_states,
        alphabet=["a", "b", "c", d], initial="t0", transitions=top + red + blue,
        bounds=(1, 2), name="fig6-hd-buchi",
    )


def fig7(n: int) -> ParityAutomaton:
    if n < 2:
        raise InputError("fig7-mr-buchi needs n >= 2")
    nums = [str(i) for i in range(1, n + 1)]
    rows = []
    for i in nums:
        s, m, f = f"s_{i}", f"m_{i}", f"f_{i}"
        rows.append(("q0", ["$"], 1, s))
        rows.append((s, [j for j in nums if j != i], 1, s))
        rows.append((s, [i], 1, m))
        rows.append((s, ["#"], 1, "r"))
        rows.append((m, nums, 1, m))
        rows.append((m, ["#"], 1, f))
        rows.append((f, [i], 2, "q0"))
        rows.append((f, [j for j in nums if j != i], 1, "q0"))
    rows.append(("r", nums, 1, "q0"))
    alphabet = nums + ["$", "#"]
    states = ["q0", "r"] + [f"{p}_{i}" for i in nums for p in ("s", "m", "f")]
    states, ts = complete_with_sink(states, alphabet, _edges([r for r in rows if r[1]]))
    return ParityAutomaton(
        states=states, alphabet=alphabet, initial="q0", transitions=ts, bounds=(1, 2),
        name=f"fig7-mr-buchi-{n}",
    )


def parity_lang(span: Sequence[int]) -> ParityAutomaton:
    lo, hi = int(span[0]), int(span[1])
    if lo < 0 or hi < lo:
        raise InputError(f"bad span [{lo},{hi}]")
    ts = [("q", str(c), c, "q") for c in range(lo, hi + 1)]
    return ParityAutomaton(
        states=["q"], alphabet=[str(c) for c in range(lo, hi + 1)], initial="q",
        transitions=ts, bounds=(lo % 2, max(hi, 1)), name=f"parity-lang-{lo}-{hi}",
    )


def gallery(
    name: str, n: Optional[int] = None, span: Optional[Sequence[int]] = None,
    with_resolver: bool = False,
):
    """Build a fixture by name; ``with_resolver`` also returns the uniform resolver."""
    builders = {
        "fig1a-reach": fig1a,
        "fig1b-cobuchi": fig1b,
        "fig3-cobuchi-sd": fig3,
        "fig4-hd-cobuchi": fig4,
        "fig5-buchi-sd": fig5,
        "fig6-hd-buchi": fig6,
    }
    if name in builders:
        a = builders[name]()
    elif name == "fig7-mr-buchi":
        a = fig7(2 if n is None else n)
    elif name == "parity-lang":
        a = parity_lang(span if span is not None else (1, 2))
    else:
        raise InputError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}")
    if with_resolver:
        r: Resolver = uniform_resolver(a)
        return a, r
    return a
