"""Command-line interface.

Exit codes: 0 found / holds / pass, 1 not-found / does not hold / fail,
2 input error, 3 resource cap or search budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .errors import BudgetExceeded, CapExceeded, InputError, ParseError, ViewSynthError
from .model import UCQ, base_label
from .parser import parse_instance, parse_regex, parse_ucq, parse_views
from .automata import (
    DEFAULT_DET_CAP,
    compile_regex,
    difference_witness,
    to_dot,
)
from .congruence import DEFAULT_MONOID_CAP, transition_monoid
from .cq_synth import capture_check_cq, synthesize_cq, ucq_contains
from .oracle import (
    brute_view_existence_rpq,
    coherence_soundness_sample,
    eval_2rpq,
    eval_rpq,
    eval_ucq,
    parse_graph,
    rel_instance,
)
from .rpq_synth import (
    DEFAULT_SEARCH_BUDGET,
    RpqView,
    capture_check,
    synthesize,
)
from .twoway import contains_2rpq


def _env_int(name: str, default: int) -> int:
    value = os.environ.get(name)
    if value is None:
        return default
    try:
        return int(value)
    except ValueError:
        raise InputError(f"environment variable {name} is not an integer: {value!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="viewsynth",
        description="View synthesis from schema mappings (RPQ and (U)CQ families).",
    )
    parser.add_argument("--version", action="version", version=f"viewsynth {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--det-cap", type=int, default=None, help="determinization state cap")
        p.add_argument("--monoid-cap", type=int, default=None, help="monoid element cap")
        p.add_argument("--budget", type=int, default=None, help="search budget")
        p.add_argument("--dot", metavar="DIR", default=None, help="dump automata as DOT files")

    p_synth = sub.add_parser("synth", help="synthesize views for an instance file")
    p_synth.add_argument("file", help="instance file, or - for stdin")
    p_synth.add_argument("--mode", choices=("sound", "exact"), default=None)
    p_synth.add_argument("--maximal", action="store_true", help="maximize found views")
    p_synth.add_argument("--all", dest="find_all", action="store_true",
                         help="report every passing assignment")
    p_synth.add_argument("--view-kind", choices=("cq", "ucq"), default="cq")
    p_synth.add_argument("--workers", type=int, default=1)
    p_synth.add_argument("--seed", type=int, default=0)
    add_common(p_synth)
    p_synth.set_defaults(func=cmd_synth)

    p_check = sub.add_parser("check", help="check user-supplied views against an instance")
    p_check.add_argument("file")
    p_check.add_argument("--views", required=True, help="views file")
    p_check.add_argument("--mode", choices=("sound", "exact"), default=None)
    add_common(p_check)
    p_check.set_defaults(func=cmd_check)

    p_contain = sub.add_parser("contain", help="decide query containment q1 in q2")
    p_contain.add_argument("--kind", choices=("rpq", "2rpq", "cq", "ucq"), default="rpq")
    p_contain.add_argument("q1")
    p_contain.add_argument("q2")
    add_common(p_contain)
    p_contain.set_defaults(func=cmd_contain)

    p_monoid = sub.add_parser("monoid", help="print the transition monoid of a regex")
    p_monoid.add_argument("regex")
    add_common(p_monoid)
    p_monoid.set_defaults(func=cmd_monoid)

    p_oracle = sub.add_parser("oracle", help="brute-force semantics for ad-hoc use")
    osub = p_oracle.add_subparsers(dest="oracle_command", required=True)

    p_eval = osub.add_parser("eval", help="evaluate a path query over a graph file")
    p_eval.add_argument("--kind", choices=("rpq", "2rpq"), default="rpq")
    p_eval.add_argument("graph", help="edge list: node -label-> node")
    p_eval.add_argument("regex")
    add_common(p_eval)
    p_eval.set_defaults(func=cmd_oracle_eval)

    p_evalq = osub.add_parser("eval-ucq", help="evaluate a UCQ over a facts file")
    p_evalq.add_argument("facts", help="facts file: one 'pred c1 c2 ...' per line")
    p_evalq.add_argument("query")
    add_common(p_evalq)
    p_evalq.set_defaults(func=cmd_oracle_eval_ucq)

    p_brute = osub.add_parser("brute-exists", help="exhaustive RPQ view existence")
    p_brute.add_argument("file")
    p_brute.add_argument("--bound", type=int, default=None, help="view word length bound")
    add_common(p_brute)
    p_brute.set_defaults(func=cmd_oracle_brute)

    p_coh = osub.add_parser("coherence", help="sample databases against views")
    p_coh.add_argument("file")
    p_coh.add_argument("--views", required=True)
    p_coh.add_argument("--samples", type=int, default=50)
    p_coh.add_argument("--seed", type=int, default=0)
    p_coh.add_argument("--mode", choices=("sound", "exact"), default=None)
    add_common(p_coh)
    p_coh.set_defaults(func=cmd_oracle_coherence)

    return parser


def _caps(args):
    det = args.det_cap if args.det_cap is not None else _env_int(
        "VIEWSYNTH_DET_CAP", DEFAULT_DET_CAP
    )
    monoid = args.monoid_cap if args.monoid_cap is not None else _env_int(
        "VIEWSYNTH_MONOID_CAP", DEFAULT_MONOID_CAP
    )
    budget = args.budget if args.budget is not None else _env_int(
        "VIEWSYNTH_BUDGET", DEFAULT_SEARCH_BUDGET
    )
    if det <= 0 or monoid <= 0 or budget <= 0:
        raise InputError("caps and budgets must be positive")
    return det, monoid, budget


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        payload = dict(payload)
        payload["version"] = __version__
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print(text)


def _dump_dot(args, automata: dict[str, "object"]) -> None:
    if not args.dot:
        return
    outdir = Path(args.dot)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, nwa in automata.items():
        (outdir / f"{name}.dot").write_text(to_dot(nwa, name), encoding="utf-8")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_synth(args) -> int:
    det_cap, monoid_cap, budget = _caps(args)
    if args.workers < 1:
        raise InputError("worker count must be at least 1")
    instance = parse_instance(_read(args.file))
    mode = args.mode or instance.mode

    if instance.kind == "rpq":
        report = synthesize(
            instance,
            mode,
            find_all=args.find_all,
            maximal=args.maximal,
            workers=args.workers,
            det_cap=det_cap,
            monoid_cap=monoid_cap,
            budget=budget,
            seed=args.seed,
        )
        if args.dot:
            autos = {"target": compile_regex(instance.mappings[0].target)}
            _dump_dot(args, autos)
        lines = [f"outcome: {report.outcome}"]
        if report.found:
            for sym, regex in sorted(report.views_regex.items()):
                lines.append(f"view {sym} = {regex.render()}")
            if report.all_views_regex is not None and len(report.all_views_regex) > 1:
                for i, views in enumerate(report.all_views_regex[1:], start=2):
                    lines.append(f"-- solution {i} --")
                    for sym, regex in sorted(views.items()):
                        lines.append(f"view {sym} = {regex.render()}")
            stats = report.stats
            lines.append(
                f"tried {stats.assignments_tried} assignment(s), "
                f"monoid size {stats.monoid_size}, {stats.elapsed:.3f}s"
            )
        _emit(args, report.to_json(), "\n".join(lines))
        return 0 if report.found else 1

    if instance.kind in ("cq", "ucq"):
        if args.maximal:
            raise InputError("maximal views are computed for rpq instances only")
        report = synthesize_cq(
            instance, mode, view_kind=args.view_kind, budget=budget,
            find_all=args.find_all,
        )
        lines = [f"outcome: {report.outcome}"]
        if report.found:
            for sym, view in sorted(report.views.items()):
                rendered = "undefined" if view is None else view.render()
                lines.append(f"view {sym} = {rendered}")
            if report.all_views is not None and len(report.all_views) > 1:
                for i, views in enumerate(report.all_views[1:], start=2):
                    lines.append(f"-- solution {i} --")
                    for sym, view in sorted(views.items()):
                        rendered = "undefined" if view is None else view.render()
                        lines.append(f"view {sym} = {rendered}")
        _emit(args, report.to_json(), "\n".join(lines))
        return 0 if report.found else 1

    raise InputError("synthesis for 2rpq views is not supported (containment only)")


def cmd_check(args) -> int:
    det_cap, _, _ = _caps(args)
    instance = parse_instance(_read(args.file))
    mode = args.mode or instance.mode
    views_q = parse_views(_read(args.views), instance)
    occurring = instance.occurring_source_symbols()
    missing = [s for s in occurring if s not in views_q]
    if missing:
        raise InputError(f"views file misses occurring symbol(s) {missing}")

    if instance.kind in ("rpq", "2rpq"):
        views = {
            sym: RpqView.empty() if q is None else RpqView.explicit(compile_regex(q))
            for sym, q in views_q.items()
        }
        result = capture_check(instance, views, None, mode, det_cap)
        lines = [f"capture: {'holds' if result.ok else 'fails'} ({mode})"]
        for i, rec in enumerate(result.per_mapping):
            status = "ok" if rec.ok(mode) else "violated"
            lines.append(f"mapping {i}: {status}")
            if rec.witness is not None:
                lines.append(f"  nonempty witness: {' '.join(rec.witness) or 'eps'}")
            if rec.separating is not None:
                lines.append(f"  separating word: {' '.join(rec.separating) or 'eps'}")
            if mode == "exact" and rec.reverse_separating is not None:
                word = " ".join(rec.reverse_separating) or "eps"
                lines.append(f"  missing from rewriting: {word}")
        _emit(args, result.to_json(), "\n".join(lines))
        return 0 if result.ok else 1

    records = capture_check_cq(instance, views_q, mode)
    ok = all(r.ok(mode) for r in records)
    lines = [f"capture: {'holds' if ok else 'fails'} ({mode})"]
    for i, rec in enumerate(records):
        lines.append(f"mapping {i}: {'ok' if rec.ok(mode) else 'violated'}")
    payload = {
        "ok": ok,
        "mode": mode,
        "mappings": [r.to_json(mode) for r in records],
    }
    _emit(args, payload, "\n".join(lines))
    return 0 if ok else 1


def cmd_contain(args) -> int:
    det_cap, _, _ = _caps(args)
    if args.kind in ("rpq", "2rpq"):
        two_way = args.kind == "2rpq"
        r1 = parse_regex(args.q1, None, two_way=two_way)
        r2 = parse_regex(args.q2, None, two_way=two_way)
        labels = {base_label(s) for s in r1.symbols()} | {
            base_label(s) for s in r2.symbols()
        }
        a1 = compile_regex(r1, alphabet=labels if not two_way else None)
        a2 = compile_regex(r2, alphabet=labels if not two_way else None)
        _dump_dot(args, {"q1": a1, "q2": a2})
        witness = None
        if two_way:
            holds = contains_2rpq(a1, a2, cap=det_cap)
        else:
            witness = difference_witness(a1, a2, cap=det_cap)
            holds = witness is None
        payload = {"holds": holds, "kind": args.kind}
        text = f"containment {'holds' if holds else 'does not hold'}"
        if witness is not None:
            payload["witness"] = list(witness)
            text += f" (witness: {' '.join(witness) or 'eps'})"
        _emit(args, payload, text)
        return 0 if holds else 1

    q1 = parse_ucq(args.q1)
    q2 = parse_ucq(args.q2)
    if q1.arity != q2.arity:
        raise InputError("queries disagree on head arity")
    holds = ucq_contains(q1, q2)
    _emit(
        args,
        {"holds": holds, "kind": args.kind},
        f"containment {'holds' if holds else 'does not hold'}",
    )
    return 0 if holds else 1


def cmd_monoid(args) -> int:
    _, monoid_cap, _ = _caps(args)
    regex = parse_regex(args.regex, None)
    auto = compile_regex(regex)
    monoid = transition_monoid(auto, cap=monoid_cap)
    _dump_dot(args, {"target": auto})
    lines = [
        f"automaton states: {auto.n_states}",
        f"monoid size: {len(monoid.elements)}",
    ]
    for i, element in enumerate(monoid.elements):
        witness = " ".join(monoid.witnesses[i]) or "eps"
        pairs = ", ".join(f"({p},{q})" for p, q in sorted(element.pairs())) or "(none)"
        tag = " = identity" if i == monoid.identity_index else ""
        lines.append(f"element {i}{tag}: witness '{witness}' relation {{{pairs}}}")
    payload = {"automaton_states": auto.n_states, "monoid": monoid.to_json()}
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_oracle_eval(args) -> int:
    db = parse_graph(_read(args.graph))
    two_way = args.kind == "2rpq"
    regex = parse_regex(args.regex, None, two_way=two_way)
    auto = compile_regex(regex)
    pairs = sorted(eval_2rpq(db, auto) if two_way else eval_rpq(db, auto))
    text = "\n".join(f"{x} {y}" for x, y in pairs) or "(no pairs)"
    _emit(args, {"pairs": [list(p) for p in pairs]}, text)
    return 0


def cmd_oracle_eval_ucq(args) -> int:
    facts: dict[str, set[tuple[str, ...]]] = {}
    for lineno, raw in enumerate(_read(args.facts).splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        pred, *consts = line.split()
        if not consts:
            raise ParseError("a fact needs at least one constant", lineno)
        facts.setdefault(pred, set()).add(tuple(consts))
    query = parse_ucq(args.query)
    rows = sorted(eval_ucq(rel_instance(facts), query))
    text = "\n".join(" ".join(r) for r in rows) or "(no tuples)"
    _emit(args, {"tuples": [list(r) for r in rows]}, text)
    return 0


def cmd_oracle_brute(args) -> int:
    _, _, budget = _caps(args)
    instance = parse_instance(_read(args.file))
    outcome, views = brute_view_existence_rpq(instance, args.bound, budget=budget)
    lines = [f"outcome: {outcome}"]
    views_json = None
    if views is not None:
        views_json = {}
        for sym, word in sorted(views.items()):
            rendered = "empty" if word is None else (" ".join(word) or "eps")
            views_json[sym] = rendered
            lines.append(f"view {sym} = {rendered}")
    _emit(args, {"outcome": outcome, "views": views_json}, "\n".join(lines))
    return 0 if outcome == "found" else 1


def cmd_oracle_coherence(args) -> int:
    instance = parse_instance(_read(args.file))
    views_q = parse_views(_read(args.views), instance)
    if instance.kind in ("rpq", "2rpq"):
        views = {
            sym: None if q is None else compile_regex(q) for sym, q in views_q.items()
        }
    else:
        views = {
            sym: q if (q is None or isinstance(q, UCQ)) else UCQ((q,))
            for sym, q in views_q.items()
        }
    report = coherence_soundness_sample(
        instance, views, samples=args.samples, seed=args.seed, mode=args.mode
    )
    text = f"coherence sampling: {'pass' if report.ok else 'FAIL'} ({report.samples} samples)"
    if report.counterexample is not None:
        text += f"\ncounterexample: {json.dumps(report.counterexample, sort_keys=True)}"
    _emit(args, report.to_json(), text)
    return 0 if report.ok else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CapExceeded, BudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ParseError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ViewSynthError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
