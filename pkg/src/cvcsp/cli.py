"""Command-line entry point wiring every module together.

Subcommands: classify, solve, check-mm, express, graph, reduce, verify, gen.
Results go to stdout, diagnostics to stderr.  Exit codes: 0 success/tractable,
1 failed check, 2 NP-hard, 3 unknown at budget, 64 malformed input,
65 capability cap exceeded.  All output is deterministic for fixed inputs
and flags; the only randomness (``gen``) sits behind --seed.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .classify import Budgets, Tractable, NPHard, certificate, classify, replay_certificate
from .core import (
    CapabilityError,
    Instance,
    Language,
    StructuralError,
    cost_str,
    instance_from_json,
    instance_to_json,
    language_from_json,
    language_to_json,
)
from .express import binary_closure, member_to_json
from .graph import build_pair_graph, check_graph_consistency, graph_to_dot, graph_to_json
from .ops import BinaryOp, OpPair, OpTriple, TernaryOp, check_multimorphism
from .reduce import cap_reduce, derive_language, minhom_reduce
from .solver import brute_force_solve

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_NP_HARD = 2
EXIT_UNKNOWN = 3
EXIT_MALFORMED = 64
EXIT_CAPABILITY = 65


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise StructuralError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise StructuralError(f"{path}: {exc.strerror or exc}") from exc


def _load_language(path: str) -> Language:
    try:
        return language_from_json(_load_json(path), where=path)
    except StructuralError:
        raise
    except Exception as exc:
        raise StructuralError(f"{path}: {exc}") from exc


def _load_instance(path: str) -> Instance:
    return instance_from_json(_load_json(path), where=path)


def _emit(obj, out_path: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _budgets(args) -> Budgets:
    return Budgets(closure_rounds=args.budget_rounds,
                   closure_size=args.budget_size,
                   max_domain=args.max_domain)


def _add_budget_flags(p, max_domain=True):
    p.add_argument("--budget-rounds", type=int, default=4)
    p.add_argument("--budget-size", type=int, default=256)
    if max_domain:
        p.add_argument("--max-domain", type=int, default=4)


def cmd_classify(args) -> int:
    language = _load_language(args.language)
    verdict = classify(language, _budgets(args), strategy=args.strategy)
    print(f"seed: {args.seed}", file=sys.stderr)
    for line in verdict.trace:
        print(line, file=sys.stderr)
    cert = certificate(verdict, language)
    if args.emit_certificate:
        _emit(cert, args.emit_certificate)
    result = {"verdict": verdict.kind}
    if isinstance(verdict, Tractable):
        result["m_set"] = sorted([list(p) for p in verdict.m_set])
    elif isinstance(verdict, NPHard):
        result["reason"] = verdict.reason_kind
    else:
        result["stage"] = verdict.stage
    print(json.dumps(result, sort_keys=True))
    return verdict.exit_code


def cmd_solve(args) -> int:
    instance = _load_instance(args.instance)
    language = _load_language(args.language)
    solution = brute_force_solve(instance, language, workers=args.workers)
    print(json.dumps({"assignment": list(solution.assignment),
                      "cost": cost_str(solution.cost),
                      "feasible": solution.feasible}, sort_keys=True))
    return EXIT_OK


def _ops_from_json(obj, d: int):
    if "pair" in obj:
        pair = obj["pair"]
        return OpPair(BinaryOp(d, tuple(pair["meet"])), BinaryOp(d, tuple(pair["join"])))
    if "triple" in obj:
        t = obj["triple"]
        return OpTriple(TernaryOp(d, tuple(t["mj1"])), TernaryOp(d, tuple(t["mj2"])),
                        TernaryOp(d, tuple(t["mn3"])))
    if "op" in obj:
        table = tuple(obj["op"]["table"])
        if len(table) == d * d:
            return BinaryOp(d, table)
        if len(table) == d ** 3:
            return TernaryOp(d, table)
        raise StructuralError("op table length matches neither d^2 nor d^3")
    raise StructuralError("operations file needs a 'pair', 'triple', or 'op' key")


def cmd_check_mm(args) -> int:
    language = _load_language(args.language)
    ops = _ops_from_json(_load_json(args.operations), language.domain_size)
    report = check_multimorphism(ops, language)
    print(json.dumps(report.to_json(), sort_keys=True))
    return EXIT_OK if report.holds else EXIT_FAILED_CHECK


def cmd_express(args) -> int:
    language = _load_language(args.language)
    closure = binary_closure(language, args.budget_rounds, args.budget_size)
    payload = {
        "domain_size": closure.domain_size,
        "saturated": closure.saturated,
        "rounds_run": closure.rounds_run,
        "budget_rounds": closure.budget_rounds,
        "budget_size": closure.budget_size,
        "members": [member_to_json(m) for m in closure.members],
    }
    _emit(payload, args.out)
    return EXIT_OK


def cmd_graph(args) -> int:
    language = _load_language(args.language)
    closure = binary_closure(language, args.budget_rounds, args.budget_size)
    g = build_pair_graph(closure)
    report = check_graph_consistency(g)
    print(report.summary(), file=sys.stderr)
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(graph_to_dot(g) + "\n")
    _emit(graph_to_json(g, closure if args.members else None), args.out)
    return EXIT_OK


def cmd_reduce(args) -> int:
    if args.mode in ("feas", "minhom", "bar"):
        language = _load_language(args.language)
        _emit(language_to_json(derive_language(language, args.mode)), args.out)
        return EXIT_OK
    if args.mode == "cap":
        if not args.instance:
            raise StructuralError("--mode cap needs an instance file")
        instance = _load_instance(args.instance)
        language = _load_language(args.language)
        red = cap_reduce(instance, language)
        _emit({"instance": instance_to_json(red.instance),
               "language": language_to_json(red.language),
               "cap": cost_str(red.cap),
               "copies": red.copies,
               "threshold": cost_str(red.threshold)}, args.out)
        return EXIT_OK
    if args.mode == "minhom-reduce":
        if not (args.instance and args.originals):
            raise StructuralError("--mode minhom-reduce needs an instance and --originals")
        instance = _load_instance(args.instance)
        language = _load_language(args.language)
        originals_language = _load_language(args.originals)
        if len(originals_language.functions) != len(language.functions):
            raise StructuralError(
                "--originals must list one function per language function "
                "(unary slots are ignored)")
        originals = {i: fn for i, fn in enumerate(originals_language.functions)
                     if language.functions[i].arity >= 2}
        red = minhom_reduce(instance, language, originals)
        _emit({"instance": instance_to_json(red.instance),
               "language": language_to_json(red.language),
               "cap": cost_str(red.cap),
               "copies": red.copies,
               "scale": cost_str(red.scale)}, args.out)
        return EXIT_OK
    raise StructuralError(f"unknown mode {args.mode!r}")


def cmd_verify(args) -> int:
    cert = _load_json(args.certificate)
    language = _load_language(args.language)
    ok, message = replay_certificate(cert, language)
    print(message)
    return EXIT_OK if ok else EXIT_FAILED_CHECK


def _gen_cost(rng: random.Random, style: str):
    if style == "crisp":
        return 0 if rng.random() < 0.6 else "inf"
    if style == "finite":
        return rng.randint(0, 6)
    # general: mostly small ints, some infinities
    return "inf" if rng.random() < 0.25 else rng.randint(0, 6)


def cmd_gen(args) -> int:
    rng = random.Random(args.seed)
    if args.kind == "language":
        d = args.domain_size
        functions = []
        for _ in range(args.functions):
            arity = rng.randint(1, args.max_arity)
            table = [_gen_cost(rng, args.values) for _ in range(d ** arity)]
            functions.append({"arity": arity, "table": table})
        payload = {"domain_size": d, "unary_closure": args.unary_closure,
                   "functions": functions}
        language_from_json(payload)  # self-check before emitting
        _emit(payload, args.out)
        return EXIT_OK
    if args.kind == "instance":
        if not args.language:
            raise StructuralError("gen --kind instance needs --language")
        language = _load_language(args.language)
        n = args.num_vars
        terms = []
        for _ in range(args.terms):
            fn = rng.randrange(len(language.functions))
            arity = language.functions[fn].arity
            scope = [rng.randrange(n) for _ in range(arity)]
            terms.append({"fn": fn, "scope": scope})
        payload = {"num_vars": n, "terms": terms}
        instance_from_json(payload).validate(language)
        _emit(payload, args.out)
        return EXIT_OK
    raise StructuralError(f"unknown kind {args.kind!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvcsp",
        description="Classify, solve, and transform valued constraint languages "
                    "with exact arithmetic.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="run the dichotomy pipeline on a language")
    p.add_argument("language")
    _add_budget_flags(p)
    p.add_argument("--strategy", choices=["exhaustive", "backtracking"], default=None)
    p.add_argument("--emit-certificate", metavar="PATH", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("solve", help="brute-force an instance exactly")
    p.add_argument("instance")
    p.add_argument("language")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("check-mm", help="check operations against a language")
    p.add_argument("language")
    p.add_argument("operations", help="JSON file with a 'pair', 'triple', or 'op' key")
    p.set_defaults(fn=cmd_check_mm)

    p = sub.add_parser("express", help="emit the budgeted binary closure with provenance")
    p.add_argument("language")
    _add_budget_flags(p, max_domain=False)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_express)

    p = sub.add_parser("graph", help="emit the pair graph as JSON (optionally DOT)")
    p.add_argument("language")
    _add_budget_flags(p, max_domain=False)
    p.add_argument("--dot", metavar="PATH", default=None)
    p.add_argument("--members", action="store_true",
                   help="include closure member tables in the output")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_graph)

    p = sub.add_parser("reduce", help="language/instance rewrites")
    p.add_argument("--mode", required=True,
                   choices=["feas", "minhom", "bar", "cap", "minhom-reduce"])
    p.add_argument("language")
    p.add_argument("instance", nargs="?", default=None)
    p.add_argument("--originals", metavar="PATH", default=None,
                   help="language file of general-valued preimages (minhom-reduce)")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("verify", help="replay a certificate against a language")
    p.add_argument("certificate")
    p.add_argument("language")
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("gen", help="emit a seeded random language or instance")
    p.add_argument("--kind", required=True, choices=["language", "instance"])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--domain-size", type=int, default=2)
    p.add_argument("--functions", type=int, default=2)
    p.add_argument("--max-arity", type=int, default=2)
    p.add_argument("--values", choices=["crisp", "finite", "general"], default="general")
    p.add_argument("--unary-closure", choices=["none", "finite", "general"],
                   default="finite")
    p.add_argument("--language", default=None)
    p.add_argument("--num-vars", type=int, default=4)
    p.add_argument("--terms", type=int, default=4)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_gen)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except StructuralError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except CapabilityError as exc:
        print(f"capability error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY


if __name__ == "__main__":
    sys.exit(main())
