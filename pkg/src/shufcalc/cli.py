"""Command-line front end: ``shufcalc <command> [options] TERM``."""

from __future__ import annotations

import argparse
import json
import os
import random
import sys

from .corpus import gen_corpus
from .rewrite import DEFAULT_FUEL, Dir, InvalidRedex, Position, Rule, apply_step, normalize, redexes
from .semantics import UnsuitableVars, interpret_bounded
from .suites import SUITES, run_all
from .syntax import ParseError, parse, print_term, term_to_json
from .transport import count_beta_steps, derive
from .typesys import TypingError, check_derivation, derivation_from_json, derivation_to_json, show_derivation, size

EXIT_OK, EXIT_INPUT, EXIT_PROPERTY = 0, 1, 2


class InputError(Exception):
    pass


def _default_fuel() -> int:
    raw = os.environ.get("SHUF_FUEL")
    if raw is None:
        return DEFAULT_FUEL
    try:
        fuel = int(raw)
    except ValueError:
        raise InputError(f"SHUF_FUEL must be an integer, got {raw!r}") from None
    if fuel < 0:
        raise InputError("SHUF_FUEL must be non-negative")
    return fuel


def _term_text(args) -> str:
    if args.file:
        with open(args.file, encoding="utf-8") as fh:
            return fh.read()
    if args.term is None or args.term == "-":
        return sys.stdin.read()
    return args.term


def _read_term(args):
    return parse(_term_text(args))


def _parse_pos(text: str) -> Position:
    text = text.strip()
    if text in ("", "root", "."):
        return Position.of(())
    try:
        return Position.of(tuple(Dir(d) for d in text.replace(".", ",").split(",") if d))
    except ValueError:
        raise InputError(f"bad position {text!r}; use comma-separated fun/arg/body") from None


def _emit(args, data, text: str):
    print(json.dumps(data, indent=2, ensure_ascii=False) if args.json else text)


# ---------------------------------------------------------------- commands


def cmd_parse(args) -> int:
    t = _read_term(args)
    _emit(args, {"term": print_term(t), "ast": term_to_json(t)}, print_term(t))
    return EXIT_OK


def cmd_reduce(args) -> int:
    t = _read_term(args)
    balanced = not args.full
    if args.pos is not None:
        if args.rule is None:
            raise InputError("--pos needs --rule")
        pos = Position(_parse_pos(args.pos).path, balanced)
        rule = Rule(args.rule)
    else:
        found = redexes(t, balanced)
        if not found:
            _emit(args, {"term": print_term(t), "step": None}, f"{print_term(t)} is normal")
            return EXIT_OK
        if args.strategy == "random":
            pos, rule = random.Random(args.seed).choice(found)
        else:
            pos, rule = found[0]
        pos = Position(pos.path, balanced)
    step = apply_step(t, pos, rule)
    _emit(args, {"term": print_term(t), "step": step.to_json()}, print_term(step.after))
    return EXIT_OK


def cmd_normalize(args) -> int:
    t = _read_term(args)
    trace = normalize(t, args.strategy, not args.full, args.fuel, seed=args.seed)
    lines = [print_term(t)] + [f"-{s.rule.value}-> {print_term(s.after)}" for s in trace.steps]
    lines.append(f"outcome: {trace.outcome}, beta_v steps: {trace.len_bv}, sigma steps: {trace.len_sigma}")
    _emit(args, trace.to_json(), "\n".join(lines))
    return EXIT_OK


def cmd_typecheck(args) -> int:
    path = args.file or args.term
    if path is None:
        raise InputError("typecheck needs a derivation file")
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid JSON: {exc}") from None
    d = derivation_from_json(data)
    violations = check_derivation(d)
    report = {"valid": not violations, "size": size(d), "violations": [str(v) for v in violations]}
    text = f"valid, size {size(d)}" if not violations else "\n".join(["invalid:"] + report["violations"])
    _emit(args, report, text)
    return EXIT_OK if not violations else EXIT_INPUT


def cmd_derive(args) -> int:
    t = _read_term(args)
    found = derive(t, args.fuel)
    if found is None:
        _emit(args, {"term": print_term(t), "derivation": None}, "no derivation: normalization ran out of fuel")
        return EXIT_PROPERTY
    pi, _ = found
    _emit(args, derivation_to_json(pi), show_derivation(pi) + f"\nsize: {size(pi)}")
    return EXIT_OK


def cmd_count(args) -> int:
    t = _read_term(args)
    verdict = count_beta_steps(t, args.fuel)
    text = f"{verdict.len_bv} beta_v steps" if verdict.finite else "unknown: fuel exhausted"
    _emit(args, verdict.to_json(), text)
    return EXIT_OK


def cmd_semantics(args) -> int:
    t = _read_term(args)
    vars = None if args.vars is None else [v for v in args.vars.split(",") if v]
    sem = interpret_bounded(t, vars, args.depth, args.width, args.fuel)
    data = sem.to_json()
    lines = [f"{len(data['points'])} points (complete: {sem.complete})"]
    lines += [f"({', '.join(json.dumps(e) for e in p['env'])}) |-> {json.dumps(p['result'])}" for p in data["points"]]
    _emit(args, data, "\n".join(lines))
    return EXIT_OK


def cmd_verify(args) -> int:
    names = args.suite or list(SUITES)
    unknown = [n for n in names if n not in SUITES]
    if unknown:
        raise InputError(f"unknown suite(s): {', '.join(unknown)}; choose from {', '.join(SUITES)}")
    results = sorted(run_all(names), key=lambda r: r.name)
    ok = all(r.passed for r in results)
    lines = [f"{'PASS' if r.passed else 'FAIL'} {r.name} ({r.seconds:.2f}s) {json.dumps(r.details)}" for r in results]
    for r in results:
        lines += [f"  witness: {json.dumps(w)}" for w in r.witnesses]
    _emit(args, {"passed": ok, "suites": [r.to_json() for r in results]}, "\n".join(lines))
    return EXIT_OK if ok else EXIT_PROPERTY


def cmd_gen_corpus(args) -> int:
    terms = gen_corpus(args.seed or 0, args.count, args.max_size)
    printed = [print_term(t) for t in terms]
    out = json.dumps(printed, indent=2) if args.json else "\n".join(printed)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(out + "\n")
    else:
        print(out)
    return EXIT_OK


COMMANDS = {
    "parse": (cmd_parse, "parse a term and echo it"),
    "reduce": (cmd_reduce, "apply one reduction step"),
    "normalize": (cmd_normalize, "reduce to normal form and print the trace"),
    "typecheck": (cmd_typecheck, "check a derivation stored as JSON"),
    "derive": (cmd_derive, "build a derivation of a normalizing term"),
    "count": (cmd_count, "count beta_v steps via derivation size"),
    "semantics": (cmd_semantics, "bounded relational interpretation"),
    "verify": (cmd_verify, "run the acceptance suites"),
    "gen-corpus": (cmd_gen_corpus, "print seeded random terms"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=int, default=None)
    common.add_argument("--strategy", choices=("leftmost", "random"), default="leftmost")
    common.add_argument("--seed", type=int, default=None)
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--full", action="store_true", help="allow steps under unapplied abstractions")
    mode.add_argument("--balanced", action="store_true", help="balanced contexts only (default)")
    common.add_argument("--depth", type=int, default=2)
    common.add_argument("--width", type=int, default=2)
    common.add_argument("--json", action="store_true")
    common.add_argument("-f", "--file", help="read the input from a file")

    parser = argparse.ArgumentParser(prog="shufcalc", description="Shuffling call-by-value lambda calculus toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text)
        if name == "verify":
            p.add_argument("--suite", action="append", help="suite to run (repeatable); default all")
        elif name == "gen-corpus":
            p.add_argument("--count", type=int, default=100)
            p.add_argument("--max-size", type=int, default=12)
            p.add_argument("-o", "--output")
        else:
            p.add_argument("term", nargs="?", help="term text, '-' for stdin (a file path for typecheck)")
        if name == "reduce":
            p.add_argument("--pos", help="comma-separated path of fun/arg/body; default: chosen by --strategy")
            p.add_argument("--rule", choices=[r.value for r in Rule])
        if name == "semantics":
            p.add_argument("--vars", help="comma-separated variable order; default: sorted free variables")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # usage errors are input errors, not property failures
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.fuel is None:
            args.fuel = _default_fuel()
        if args.fuel < 0 or args.depth < 0 or args.width < 0:
            raise InputError("--fuel, --depth and --width must be non-negative")
        handler, _ = COMMANDS[args.command]
        return handler(args)
    except (ParseError, InputError, InvalidRedex, TypingError, UnsuitableVars, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
