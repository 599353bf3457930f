"""Command-line front end.

Exit codes: 0 when a verdict was computed (including "no" and "unknown"),
2 for input errors, 3 when a resource bound was hit, 1 for internal errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

from . import __version__
from .automata import LassoWord, ProbabilisticParityAutomaton, Transition, canon_key, resolver_product, uniform_resolver
from .classify import check_ma_certificate, classify, is_ma, is_pre_sd, is_semantically_deterministic, sr_cobuchi_to_ma
from .errors import InputError, Limits, OracleMismatch, ResourceLimitError
from .gadgets import build_hardness_instance, pba_to_cobuchi, pfa_to_buchi
from .gallery import FIXTURES, gallery
from .games import is_history_deterministic
from .io import (
    fmt_fraction,
    parse_automaton,
    parse_game2d,
    parse_lasso,
    parse_mdp,
    parse_pfa,
    parse_resolver,
    serialize_automaton,
    serialize_resolver,
)
from .mdp import almost_sure_muller_verdict
from .prob import lasso_acceptance_probability, monte_carlo_estimate
from .zielonka import dag_from_nested

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3


def jsonable(x: Any) -> Any:
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return fmt_fraction(x)
    if isinstance(x, float):
        return x
    if isinstance(x, LassoWord):
        return str(x)
    if isinstance(x, Transition):
        return [jsonable(t) for t in x]
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (set, frozenset)):
        return [jsonable(v) for v in sorted(x, key=canon_key)]
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "value"):
        return jsonable(x.value)
    return str(x)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}")


def _automaton(args):
    return parse_automaton(_read(args.input))


def _limits(args) -> Limits:
    return Limits(
        max_product_states=args.max_product_states,
        max_subset_search=args.max_subset_search,
        deadline_seconds=args.deadline_seconds,
    )


class Report:
    """Collects the JSON result and the human-readable lines in parallel."""

    def __init__(self) -> None:
        self.result: dict = {}
        self.lines: list = []

    def put(self, key: str, value, text: Optional[str] = None) -> None:
        self.result[key] = value
        if text is not None:
            self.lines.append(text)

    def say(self, text: str) -> None:
        self.lines.append(text)


def _yn(b: bool) -> str:
    return "yes" if b else "no"


# ---------------------------------------------------------------------------
# commands


def cmd_classify(args, rep: Report) -> None:
    a = _automaton(args)
    r = classify(a, _limits(args))
    rep.put("automaton", a.name, f"automaton {a.name} ({r.acceptance.value})")
    rep.put("acceptance", r.acceptance.value)
    rep.put("verdicts", dict(r.verdicts))
    rep.put("notes", dict(r.notes))
    rep.put("evidence", jsonable(r.evidence))
    for cls, v in r.verdicts.items():
        rep.say(f"{cls:6s} {v:8s} {r.notes.get(cls, '')}")
    for w, p in r.evidence.get("uniform", []):
        rep.say(f"uniform resolver on {w}: {fmt_fraction(p)}")


def cmd_check_hd(args, rep: Report) -> None:
    a = _automaton(args)
    v = is_history_deterministic(a, _limits(args))
    rep.put("HD", _yn(v.holds), f"HD: {_yn(v.holds)}")
    rep.put("arena_vertices", v.arena_size, f"2-token arena vertices: {v.arena_size}")


def cmd_check_ma(args, rep: Report) -> None:
    a = _automaton(args)
    lim = _limits(args)
    if args.certificate:
        b = parse_automaton(_read(args.certificate))
        ok = check_ma_certificate(a, b, limits=lim)
        rep.put("certificate_ok", ok, f"certificate resolves uniformly: {_yn(ok)}")
        return
    v = is_ma(a, lim)
    rep.put("MA", _yn(v.holds), f"MA: {_yn(v.holds)}")
    rep.put("examined", v.examined, f"subautomata examined: {v.examined}")
    if v.certificate is not None:
        doc = serialize_automaton(v.certificate.renamed(f"{a.name}-ma-cert"))
        rep.put("certificate", doc, "certificate:\n" + doc.rstrip())


def cmd_check_sd(args, rep: Report) -> None:
    a = _automaton(args)
    v = is_semantically_deterministic(a, _limits(args))
    rep.put("SD", _yn(v.holds), f"SD: {_yn(v.holds)}")
    if v.witness is not None:
        q, x, p, r, w = v.witness
        wit = {"state": q, "letter": x, "successors": [p, r], "lasso": str(w)}
        rep.put("witness", jsonable(wit), f"from {q} on {x}: {p} and {r} differ on {w}")


def cmd_check_presd(args, rep: Report) -> None:
    a = _automaton(args)
    v = is_pre_sd(a, _limits(args))
    rep.put("preSD", _yn(v.holds), f"preSD: {_yn(v.holds)}")
    rep.put("examined", v.examined, f"subautomata examined: {v.examined}")
    if v.certificate is not None:
        doc = serialize_automaton(v.certificate.renamed(f"{a.name}-sd-sub"))
        rep.put("certificate", doc, "SD subautomaton:\n" + doc.rstrip())


def cmd_convert(args, rep: Report) -> None:
    a = _automaton(args)
    res = sr_cobuchi_to_ma(a, _limits(args))
    h_doc = serialize_automaton(res.h)
    c_doc = serialize_automaton(res.certificate.renamed(f"{res.h.name}-cert"))
    rep.put("states_before", len(a.states))
    rep.put("states_after", len(res.h.states))
    rep.put("notes", list(res.notes))
    rep.put("automaton", h_doc, h_doc.rstrip())
    rep.put("certificate", c_doc)
    if args.out:
        Path(args.out).write_text(h_doc, encoding="utf-8")


def _product(args, a):
    if args.resolver in (None, "uniform"):
        if isinstance(a, ProbabilisticParityAutomaton) and args.resolver is None:
            return a
        r = uniform_resolver(a)
    else:
        r = parse_resolver(_read(args.resolver), a)
    return resolver_product(r, a)


def cmd_prob(args, rep: Report) -> None:
    a = _automaton(args)
    w = parse_lasso(args.word)
    res = lasso_acceptance_probability(_product(args, a), w)
    rep.put("word", str(w))
    rep.put("value", fmt_fraction(res.value), fmt_fraction(res.value))
    rep.put("components", [
        {"size": len(c.states), "max_priority": c.max_priority, "accepting": c.accepting,
         "reach": fmt_fraction(c.reach)}
        for c in res.components
    ])


def cmd_simulate(args, rep: Report) -> None:
    a = _automaton(args)
    p = _product(args, a)
    w = parse_lasso(args.word)
    horizon = args.horizon if args.horizon is not None else max(len(p.states), 100)
    est = monte_carlo_estimate(p, w, args.trials, horizon, args.seed, args.confidence)
    rep.put("word", str(w))
    rep.put("accepted", est.accepted)
    rep.put("trials", est.trials)
    rep.put("frequency", fmt_fraction(Fraction(est.accepted, est.trials)))
    rep.put("estimate", est.estimate, f"estimate {est.estimate:.6f} +/- {est.radius:.6f} "
                                      f"({est.accepted}/{est.trials}, confidence {est.confidence})")
    rep.put("radius", est.radius)
    rep.put("unresolved", est.unresolved, f"trials undecided at the horizon: {est.unresolved}")


def _text_labels(node):
    """MDP documents name colours by tokens, so JSON numbers become strings."""
    if not isinstance(node, dict):
        raise InputError("DAG node must be a JSON object")
    out = dict(node)
    if isinstance(node.get("label"), list):
        out["label"] = [str(c) if isinstance(c, (int, str)) else c for c in node["label"]]
    out["children"] = [_text_labels(c) for c in node.get("children", [])]
    return out


def cmd_solve_mdp(args, rep: Report) -> None:
    m = parse_mdp(_read(args.input))
    try:
        doc = json.loads(_read(args.dag))
    except json.JSONDecodeError as exc:
        raise InputError(f"DAG file is not JSON: {exc}")
    z = dag_from_nested(_text_labels(doc))
    v = almost_sure_muller_verdict(m, z, reverse_ties=args.reverse_ties)
    rep.put("almost_sure", jsonable(v.almost_sure), "almost-sure: " + " ".join(map(str, jsonable(v.almost_sure))))
    rep.put("positive", jsonable(v.positive), "positive: " + " ".join(map(str, jsonable(v.positive))))
    strat = {str(u): [jsonable(e) for e in es] for u, es in sorted(v.strategy.items(), key=lambda kv: canon_key(kv[0]))}
    rep.put("strategy", strat)
    for u, es in strat.items():
        rep.say(f"  {u}: " + ", ".join(f"->{e[1]}" for e in es))


def cmd_gallery(args, rep: Report) -> None:
    a = gallery(args.name, n=args.n, span=args.span)
    doc = serialize_automaton(a)
    rep.put("states", len(a.states))
    rep.put("document", doc, doc.rstrip())


def cmd_gadget(args, rep: Report) -> None:
    text = _read(args.input)
    if args.kind == "pfa2buchi":
        g = pfa_to_buchi(parse_pfa(text))
    elif args.kind == "pba2cobuchi":
        p = parse_automaton(text)
        if not isinstance(p, ProbabilisticParityAutomaton):
            raise InputError("pba2cobuchi needs 'p' transition lines")
        g = pba_to_cobuchi(p)
    else:
        game = parse_game2d(text)
        inst = build_hardness_instance(game)
        h_doc, d_doc = serialize_automaton(inst.h), serialize_automaton(inst.d)
        rep.put("eve_wins", game.eve_wins(), f"# Eve wins the game: {_yn(game.eve_wins())}")
        rep.put("automaton", h_doc, h_doc.rstrip())
        rep.put("deterministic_part", d_doc)
        rep.put("notes", list(inst.notes))
        return
    doc = serialize_automaton(g.automaton)
    rdoc = serialize_resolver(g.resolver, g.automaton)
    rep.put("automaton", doc, doc.rstrip())
    rep.put("resolver", rdoc, rdoc.rstrip())
    rep.put("letters", dict(g.letters))
    rep.put("notes", list(g.notes))


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("limits and output")
    g.add_argument("--max-product-states", type=int, default=Limits.max_product_states,
                   help="bound on explored product/arena states (default %(default)s)")
    g.add_argument("--max-subset-search", type=int, default=Limits.max_subset_search,
                   help="bound on removable transitions in subautomaton searches (default %(default)s)")
    g.add_argument("--deadline-seconds", type=float, default=None,
                   help="wall-clock bound per command (default: none)")
    g.add_argument("--seed", type=int, default=0, help="seed for Monte-Carlo runs (default %(default)s)")
    g.add_argument("--json", action="store_true", help="emit one JSON object")

    p = argparse.ArgumentParser(prog="resolvability", description="Stochastic resolvers for parity automata.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_, need_input=True):
        sp = sub.add_parser(name, parents=[common], help=help_, description=help_)
        if need_input:
            sp.add_argument("--in", dest="input", required=True, help="input document ('-' for stdin)")
        sp.set_defaults(fn=fn)
        return sp

    add("classify", cmd_classify, "classify an automaton into SD, preSD, HD, MA, SR, MR")
    add("check-hd", cmd_check_hd, "decide history-determinism with the 2-token game")
    sp = add("check-ma", cmd_check_ma, "decide memoryless adversarial resolvability")
    sp.add_argument("--certificate", help="subautomaton document to check instead of searching")
    add("check-sd", cmd_check_sd, "decide semantic determinism")
    add("check-presd", cmd_check_presd, "search for a language-equivalent SD subautomaton")
    sp = add("convert", cmd_convert, "convert an SR coBüchi automaton to an MA one")
    sp.add_argument("kind", choices=["sr2ma"])
    sp.add_argument("--out", help="also write the converted automaton here")
    for name, fn, help_ in (("prob", cmd_prob, "exact acceptance probability on a lasso"),
                            ("simulate", cmd_simulate, "Monte-Carlo estimate of the acceptance probability")):
        sp = add(name, fn, help_)
        sp.add_argument("--resolver", help="'uniform' or a resolver document (default: the automaton's own "
                                           "probabilities if it has any, else uniform)")
        sp.add_argument("--word", required=True, help="lasso u$v or u|v for u·v^ω")
        if name == "simulate":
            sp.add_argument("--trials", type=int, default=1000)
            sp.add_argument("--horizon", type=int, default=None,
                            help="periods per trial (default: max(product states, 100))")
            sp.add_argument("--confidence", type=float, default=0.99)
    sp = add("solve-mdp", cmd_solve_mdp, "almost-sure and positive Muller winning sets of an MDP")
    sp.add_argument("--dag", required=True, help="Zielonka DAG as nested JSON")
    sp.add_argument("--reverse-ties", action="store_true", help="process equal-size DAG nodes in reverse order")
    sp = add("gallery", cmd_gallery, "print a built-in automaton", need_input=False)
    sp.add_argument("name", choices=FIXTURES)
    sp.add_argument("--n", type=int, default=None, help="size parameter of fig7-mr-buchi")
    sp.add_argument("--span", type=int, nargs=2, default=None, help="priority span of parity-lang")
    sp = add("gadget", cmd_gadget, "build a reduction gadget")
    sp.add_argument("kind", choices=["pfa2buchi", "pba2cobuchi", "hardness"])
    return p


def _emit(args, payload: dict, lines: list, stream) -> None:
    if getattr(args, "json", False):
        stream.write(json.dumps(payload, sort_keys=True, ensure_ascii=False, indent=2) + "\n")
    else:
        for ln in lines:
            stream.write(ln + "\n")


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    rep = Report()
    payload: dict = {
        "command": args.command,
        "version": __version__,
        "limits": _limits(args).as_dict(),
        "seed": args.seed,
    }
    code = EXIT_OK
    try:
        args.fn(args, rep)
        payload["result"] = rep.result
    except ResourceLimitError as exc:
        code = EXIT_LIMIT
        payload["error"] = {"kind": "resource-limit", "message": str(exc), "partial": jsonable(exc.partial)}
    except InputError as exc:
        code = EXIT_INPUT
        payload["error"] = {"kind": "input", "message": str(exc)}
    except OracleMismatch as exc:
        code = EXIT_INTERNAL
        payload["error"] = {"kind": "internal", "message": str(exc)}
    payload["exit_code"] = code
    if code == EXIT_OK:
        _emit(args, payload, rep.lines, sys.stdout)
    else:
        if args.json:
            _emit(args, payload, [], sys.stdout)
        print(f"error: {payload['error']['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
