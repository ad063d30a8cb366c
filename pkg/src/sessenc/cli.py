"""Command-line front end: ``sessenc <command> ...``.

Exit status is 0 when the command succeeds or the property holds, 1 when a
check fails or a relation is false, and 2 on usage or parse errors.  Types are
given as quoted text; processes come from ``.spi`` (session) and ``.pi`` files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import algebra
from .correspondence import (
    check_completeness, check_soundness, check_subject_reduction, check_theorem_one, run_corpus,
)
from .encoder import encode, encode_env, encode_type
from .parser import ParseError, load_program, parse_context, parse_pi_type, parse_session_type
from .pi_check import check_pi_process
from .printer import pretty
from .semantics import Fault, concurrent_rounds, format_trace, hook_equiv, run, struct_equiv
from .session_check import TypingError, check_process
from .syntax import Chan, Unit, is_session_type

DEFAULT_SEED = 0


class UsageError(Exception):
    pass


def _seed(given):
    if given is not None:
        return given
    env = os.environ.get("SESSC_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"SESSC_SEED must be an integer, got {env!r}") from None


def _type(text: str, calculus: str = "auto"):
    if calculus == "session":
        return parse_session_type(text)
    if calculus == "pi":
        return parse_pi_type(text)
    try:
        return parse_session_type(text)
    except ParseError as first:
        try:
            return parse_pi_type(text)
        except ParseError:
            raise first from None


def _program(path: str):
    p = Path(path)
    if not p.exists():
        raise UsageError(f"no such file: {path}")
    try:
        return load_program(p)
    except ValueError as exc:  # unknown extension
        raise UsageError(str(exc)) from None


class Result:
    """What a command reports: text lines, a verdict and machine-readable fields."""

    def __init__(self, ok: bool = True, lines=(), **fields):
        self.ok = ok
        self.lines = list(lines)
        self.fields = fields


# ---------------------------------------------------------------------------
# commands


def cmd_parse(args) -> Result:
    if Path(args.target).exists():
        calculus, proc = _program(args.target)
        return Result(True, [pretty(proc)], calculus=calculus, text=pretty(proc))
    t = _type(args.target, "pi" if args.pi else "auto")
    return Result(True, [pretty(t)], text=pretty(t))


def cmd_check(args) -> Result:
    calculus, proc = _program(args.file)
    if calculus != "session":
        raise UsageError("check expects a .spi file; use check-pi for .pi files")
    ctx = parse_context(args.ctx or "")
    try:
        d = check_process(ctx, proc)
    except TypingError as exc:
        return Result(False, [f"rejected: {exc}"], verdict="reject", error=str(exc), kind=exc.kind)
    return Result(True, ["accepted", d.render()], verdict="accept", rules=d.rules(),
                  derivation=d.render())


def cmd_check_pi(args) -> Result:
    calculus, proc = _program(args.file)
    ctx_text = args.ctx or ""
    if calculus == "session":
        ctx = parse_context(ctx_text)
        proc, pi_ctx = encode(proc, ctx), encode_env(ctx)
    else:
        pi_ctx = parse_context(ctx_text, pi=True)
    try:
        d = check_pi_process(pi_ctx, proc)
    except TypingError as exc:
        return Result(False, [f"rejected: {exc}"], verdict="reject", error=str(exc), kind=exc.kind)
    return Result(True, ["accepted", d.render()], verdict="accept", rules=d.rules(),
                  process=pretty(proc), derivation=d.render())


def cmd_encode(args) -> Result:
    calculus, proc = _program(args.file)
    if calculus != "session":
        raise UsageError("encode expects a .spi file")
    out = pretty(encode(proc, parse_context(args.ctx or "")))
    return Result(True, [out], text=out)


def cmd_encode_type(args) -> Result:
    t = _type(args.type, "session")
    if not (is_session_type(t) or isinstance(t, (Unit, Chan))):
        raise UsageError("encode-type expects a session-calculus type")
    out = pretty(encode_type(t))
    return Result(True, [out], text=out)


def _relation(name, fn, calculus):
    def command(args) -> Result:
        t, s = _type(args.left, calculus), _type(args.right, calculus)
        try:
            verdict = fn(t, s)
        except algebra.TypeAlgebraError as exc:
            raise UsageError(str(exc)) from None
        return Result(verdict, ["true" if verdict else "false"], relation=name, verdict=verdict)
    return command


cmd_dual = _relation("dual", algebra.dual_session, "session")
cmd_dual_pi = _relation("dual-pi", algebra.dual_pi, "pi")


def cmd_sub(args) -> Result:
    fn = algebra.subtype_pi if args.pi else algebra.subtype_session
    return _relation("sub", fn, "pi" if args.pi else "auto")(args)


def cmd_equiv(args) -> Result:
    fn = algebra.equiv_pi if args.pi else algebra.equiv_session
    return _relation("equiv", fn, "pi" if args.pi else "auto")(args)


def cmd_complement(args) -> Result:
    t = _type(args.type, "pi" if args.pi else "auto")
    try:
        out = pretty(algebra.complement(t))
    except algebra.TypeAlgebraError as exc:
        raise UsageError(str(exc)) from None
    return Result(True, [out], text=out)


def cmd_run(args) -> Result:
    calculus, proc = _program(args.file)
    if args.encode:
        if calculus != "session":
            raise UsageError("--encode needs a .spi file")
        proc, calculus = encode(proc, parse_context(args.ctx or "")), "pi"
    trace = run(proc, args.steps)
    if args.rules_only:
        lines = [f"--rule {e.rule} at {e.location}" for e in trace[1:]]
    else:
        lines = [format_trace(trace)]
    back = None
    for i, e in enumerate(trace[1:], start=1):
        if isinstance(e.process, Fault):
            break
        if struct_equiv(e.process, proc):
            back = (i, "≡")
            break
        if calculus == "pi" and hook_equiv(e.process, proc):
            back = (i, "↪")
            break
    chain = [e.rule for e in trace[1:]]
    rounds = concurrent_rounds(trace[:back[0] + 1] if back else trace)
    shown = " -> ".join(" || ".join(f"{e.rule} {e.location}" for e in r) for r in rounds)
    if back:
        lines.append(f"rounds: {shown} -> {back[1]} start")
        lines.append(f"returns to the start up to {back[1]} after {back[0]} step(s) "
                     f"in {len(rounds)} round(s)")
    else:
        lines.append(f"rounds: {shown}")
    faulted = any(isinstance(e.process, Fault) for e in trace)
    return Result(not faulted, lines, calculus=calculus, chain=chain,
                  locations=[e.location for e in trace[1:]],
                  returns_after=back[0] if back else None,
                  returns_up_to=back[1] if back else None,
                  rounds=[[e.rule for e in r] for r in rounds],
                  trace=[e.process.message if isinstance(e.process, Fault) else pretty(e.process)
                         for e in trace])


def cmd_correspond(args) -> Result:
    calculus, proc = _program(args.file)
    if calculus != "session":
        raise UsageError("correspond expects a .spi file")
    ctx = parse_context(args.ctx or "")
    reports = [check_theorem_one(ctx, proc), check_soundness(proc, args.depth, ctx),
               check_completeness(proc, ctx), check_subject_reduction(proc, args.depth, ctx)]
    ok = all(r.ok for r in reports)
    return Result(ok, [r.line() for r in reports], reports=[r.as_dict() for r in reports])


def cmd_fuzz(args) -> Result:
    seed = _seed(args.seed)
    reports = run_corpus(args.n, seed, args.depth)
    failed = [r for r in reports if not r.ok]
    lines = [r.line() for r in (reports if args.verbose else failed)]
    lines.append(f"{len(reports) - len(failed)}/{len(reports)} checks passed "
                 f"over {args.n} processes, seed={seed}")
    return Result(not failed, lines, seed=seed, checks=len(reports), failures=len(failed),
                  reports=[r.as_dict() for r in failed])


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="sessenc", description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true", help="print a JSON verdict object")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        p.set_defaults(fn=fn)
        return p

    p = add("parse", cmd_parse, "parse and pretty-print a program file or a type")
    p.add_argument("target")
    p.add_argument("--pi", action="store_true", help="read the type as a pi type")

    for name, fn, what in (("check", cmd_check, "type check a session program"),
                           ("check-pi", cmd_check_pi, "type check a pi program "
                                                      "(a .spi file is encoded first)"),
                           ("encode", cmd_encode, "encode a session program")):
        p = add(name, fn, what)
        p.add_argument("file")
        p.add_argument("--ctx", help="typing context for free names, 'x:T; y:S'")

    p = add("encode-type", cmd_encode_type, "encode a session type")
    p.add_argument("type")

    for name, fn, what, has_pi in (("dual", cmd_dual, "session duality", False),
                                   ("dual-pi", cmd_dual_pi, "pi duality", False),
                                   ("sub", cmd_sub, "subtyping", True),
                                   ("equiv", cmd_equiv, "type equivalence", True)):
        p = add(name, fn, what)
        p.add_argument("left")
        p.add_argument("right")
        if has_pi:
            p.add_argument("--pi", action="store_true")

    p = add("complement", cmd_complement, "complement of a type")
    p.add_argument("type")
    p.add_argument("--pi", action="store_true")

    p = add("run", cmd_run, "reduce a program, printing the trace")
    p.add_argument("file")
    p.add_argument("--steps", type=int, default=4)
    p.add_argument("--encode", action="store_true", help="run the encoding of a .spi program")
    p.add_argument("--rules-only", action="store_true", help="print only the rule lines")
    p.add_argument("--ctx")

    p = add("correspond", cmd_correspond, "check typing and operational correspondence")
    p.add_argument("file")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--ctx")

    p = add("fuzz", cmd_fuzz, "run the correspondence checks on generated programs")
    p.add_argument("--n", type=int, default=50)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = args.fn(args)
    except (ParseError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if args.json:
            print(json.dumps({"command": args.command, "ok": False, "error": str(exc)}))
        return 2
    if args.json:
        print(json.dumps({"command": args.command, "ok": result.ok, **result.fields},
                         ensure_ascii=False, sort_keys=True))
    else:
        for line in result.lines:
            print(line)
    return 0 if result.ok else 1


if __name__ == "__main__":
    sys.exit(main())
