"""Executable metatheory: random generators and the correspondence checks.

The checks run the real checkers, encoder and reducers side by side and
compare verdicts.  Every generator is a pure function of ``GenConfig.seed``,
so a failing case is replayed by rerunning with the seed from its report.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable

from .algebra import complement_pi, complement_session, equiv, subtype, unfold
from .algebra import _dual as _dual_any  # unchecked variant of dual_session/dual_pi
from .encoder import encode, encode_env, encode_type, encode_value
from .pi_check import check_pi_value, pi_typechecks
from .printer import pretty
from .semantics import Fault, canonical_key, hook_equiv, step_pi, step_session
from .session_check import TypingError, check_value, typechecks
from .syntax import (
    Branch, Branching, Chan, ChanRes, End, Input, Name, Nil, Output, Par, Rec, Recv, Repl,
    Select, Selection, Send, SessRes, TVar, Unit, UnitVal, is_session_type, par, process_size,
    subprocesses, well_formed, with_subprocesses,
)

LABELS = ("l", "m", "n", "o", "p", "q")
_VARS = ("X", "Y", "Z", "W", "V")


@dataclass(frozen=True)
class GenConfig:
    """Knobs for the generators.  ``max_depth`` and ``sessions`` may be 0."""

    seed: int = 0
    max_depth: int = 3
    max_size: int = 12
    labels: int = 3
    width: int = 2
    sessions: int = 2

    def __post_init__(self):
        if self.max_depth < 0 or self.sessions < 0:
            raise ValueError("max_depth and sessions must be non-negative")
        if min(self.max_size, self.labels, self.width) < 1:
            raise ValueError("max_size, labels and width must be at least 1")
        if self.labels > len(LABELS):
            raise ValueError(f"at most {len(LABELS)} labels")


# ---------------------------------------------------------------------------
# types


def _gen_type(rng: random.Random, cfg: GenConfig, depth: int, env: tuple, unguarded: frozenset,
              rec_ok: bool = True):
    guarded = [v for v in env if v not in unguarded]
    choices = [("end", 1.0)]
    if guarded:
        choices.append(("var", 2.0))
    if depth > 0:
        choices += [("send", 3.0), ("recv", 3.0), ("select", 2.0), ("branch", 2.0)]
        if rec_ok and len(env) < len(_VARS):
            choices.append(("rec", 3.0 * 0.5 ** len(env)))
    kind = rng.choices([c for c, _ in choices], [w for _, w in choices])[0]
    if kind == "end":
        return End()
    if kind == "var":
        return TVar(rng.choice(guarded), rng.random() < 0.3)
    if kind == "rec":
        var = _VARS[len(env)]
        body = _gen_type(rng, cfg, depth, env + (var,), unguarded | {var}, rec_ok=False)
        if isinstance(body, TVar):  # only an outer, guarded variable can land here
            return body
        return Rec(var, body)
    if kind in ("send", "recv"):
        carried = _gen_carried(rng, cfg, depth - 1, env)
        cont = _gen_type(rng, cfg, depth - 1, env, frozenset())
        return (Send if kind == "send" else Recv)(carried, cont)
    k = rng.randint(1, cfg.width)
    labels = sorted(rng.sample(LABELS[:cfg.labels], min(k, cfg.labels)))
    arms = [(lab, _gen_type(rng, cfg, depth - 1, env, frozenset())) for lab in labels]
    return (Select if kind == "select" else Branch)(arms)


def _gen_carried(rng, cfg, depth, env):
    kind = rng.choices(["unit", "chan", "session"], [3, 1, 3])[0]
    if kind == "unit" or depth < 0:
        return Unit()
    if kind == "chan":
        inner = Unit() if depth == 0 or rng.random() < 0.4 else _gen_type(rng, cfg, depth, (), frozenset())
        return Chan(inner)
    return _gen_type(rng, cfg, depth, env, frozenset())


def gen_session_type(cfg: GenConfig, rng: random.Random | None = None):
    """A closed, guarded, well-formed session type of depth at most ``cfg.max_depth``."""
    rng = rng or random.Random(cfg.seed)
    t = _gen_type(rng, cfg, cfg.max_depth, (), frozenset())
    assert well_formed(t), t
    return t


def type_corpus(n: int, seed: int = 0, max_depth: int = 4) -> list:
    """``n`` session types with depths cycling through ``1..max_depth``."""
    out = []
    for i in range(n):
        cfg = GenConfig(seed=seed * 100_003 + i, max_depth=1 + i % max_depth)
        out.append(gen_session_type(cfg))
    return out


# ---------------------------------------------------------------------------
# processes


class _ProcessBuilder:
    """Builds processes by reading the typing rules backwards."""

    def __init__(self, rng: random.Random, cfg: GenConfig):
        self.rng = rng
        self.cfg = cfg
        self.gamma: dict = {}
        self.counts: dict = {}

    def fresh(self, base: str) -> str:
        n = self.counts.get(base, 0)
        self.counts[base] = n + 1
        return f"{base}{n}"

    def channel_for(self, t) -> str:
        """A free standard channel of type ``#t``, added to the context if new."""
        for k, s in self.gamma.items():
            if equiv(s.carried, t):
                return k
        k = self.fresh("k")
        self.gamma[k] = Chan(t)
        return k

    def endpoint(self, x: str, t, fuel: int):
        """A process that uses ``x:t`` exactly as the type says."""
        u = unfold(t)
        if isinstance(u, End):
            if fuel > 0 and self.rng.random() < 0.2:
                a = self.channel_for(Unit())
                return Output(a, UnitVal(), Nil())
            return Nil()
        if fuel <= 0:
            return Output(self.channel_for(t), Name(x), Nil())
        if isinstance(u, Send):
            cont = self.endpoint(x, u.cont, fuel - 1)
            value, provider = self.value(u.carried, fuel - 1)
            out = Output(x, value, cont)
            if provider is None:
                return out
            (v, w, s), body = provider
            return SessRes(v, w, s, par(out, body) if not isinstance(body, Nil) else out)
        if isinstance(u, Recv):
            z = self.fresh("z")
            rest = [self.endpoint(x, u.cont, fuel - 1)]
            if is_session_type(u.carried):
                rest.append(self.endpoint(z, u.carried, fuel - 1))
            return Input(x, z, u.carried, par(*[p for p in rest if not isinstance(p, Nil)]))
        if isinstance(u, Select):
            lab, s = self.rng.choice(u.branches)
            return Selection(x, lab, self.endpoint(x, s, fuel - 1))
        if isinstance(u, Branch):
            return Branching(x, [(lab, self.endpoint(x, s, fuel - 1)) for lab, s in u.branches])
        raise AssertionError(f"unexpected type {u!r}")

    def value(self, t, fuel: int):
        u = unfold(t)
        if isinstance(u, Unit):
            return UnitVal(), None
        if isinstance(u, Chan):
            return Name(self.channel_for(u.carried)), None
        v, w = self.fresh("u"), self.fresh("w")
        return Name(v), ((v, w, t), self.endpoint(w, complement_session(t), fuel))

    def server(self, k: str):
        """A replicated receiver on ``k`` that runs one short round of the session it gets."""
        z = self.fresh("z")
        t = self.gamma[k].carried
        return Repl(Input(k, z, t, self.endpoint(z, t, 1) if is_session_type(t) else Nil()))


def gen_typed_process(cfg: GenConfig) -> tuple[dict, object]:
    """A context of unlimited channels and a process it types, of size at most ``cfg.max_size``.

    Sessions come from generated protocols: both endpoints are built from the
    protocol and its complement, an endpoint still live when its fuel runs out
    is handed off on a standard channel, and some of those channels get a
    replicated server so traces can continue.
    """
    rng = random.Random(cfg.seed)
    for attempt in range(40):
        b = _ProcessBuilder(rng, cfg)
        parts = []
        n_sessions = rng.randint(1, cfg.sessions) if cfg.sessions else 0
        for _ in range(n_sessions):
            depth = rng.randint(1, max(1, min(cfg.max_depth, 3)))
            s = _gen_type(rng, cfg, depth, (), frozenset())
            x, y = b.fresh("x"), b.fresh("y")
            fuel = rng.randint(1, 3) if attempt < 20 else 1
            body = par(*[p for p in (b.endpoint(x, s, fuel),
                                     b.endpoint(y, complement_session(s), fuel))
                         if not isinstance(p, Nil)])
            parts.append(SessRes(x, y, s, body))
        for k in sorted(b.gamma):
            if rng.random() < 0.7:
                parts.append(b.server(k))
        if cfg.sessions and rng.random() < 0.3:
            a = b.channel_for(Unit())
            parts.append(Input(a, b.fresh("z"), Unit(), Nil()))
        p = par(*parts)
        if process_size(p) <= cfg.max_size:
            return dict(b.gamma), p
    return {}, Nil()


def process_corpus(n: int, seed: int = 0, max_size: int = 12) -> list[tuple[int, dict, object]]:
    """``n`` generated ``(seed, context, process)`` triples."""
    out = []
    for i in range(n):
        s = seed * 100_003 + i
        ctx, p = gen_typed_process(GenConfig(seed=s, max_size=max_size))
        out.append((s, ctx, p))
    return out


def _replace_at(p, path: tuple, new):
    if not path:
        return new
    kids = subprocesses(p)
    i, rest = path[0], path[1:]
    kids[i] = _replace_at(kids[i], rest, new)
    return with_subprocesses(p, kids)


def _positions(p, path=()):
    yield path, p
    for i, q in enumerate(subprocesses(p)):
        yield from _positions(q, path + (i,))


def mutants(p) -> list:
    """Linearity-breaking variants of ``p``.

    Each session restriction yields two mutants: its body duplicated
    (``B | B``, every endpoint used twice) and its body with one parallel
    component dropped (an endpoint left unused).
    """
    out = []
    for path, q in _positions(p):
        if not isinstance(q, SessRes):
            continue
        if isinstance(q.body, Nil):
            continue
        out.append(_replace_at(p, path, SessRes(q.x, q.y, q.annot, Par(q.body, q.body))))
        if isinstance(q.body, Par):
            out.append(_replace_at(p, path, SessRes(q.x, q.y, q.annot, q.body.right)))
        else:
            out.append(_replace_at(p, path, SessRes(q.x, q.y, q.annot, Nil())))
    return out


def gen_value_judgement(rng: random.Random, cfg: GenConfig):
    """A triple ``(ctx, v, t)`` whose verdict may go either way.

    Names are checked either at their own type, at an unfolding of it, or at an
    unrelated generated type.  Pairs related by strict width subtyping are not
    produced: the target calculus has no subtyping on variants.
    """
    t_x = _gen_type(rng, cfg, rng.randint(0, cfg.max_depth), (), frozenset())
    ctx = {"x": t_x, "a": Chan(Unit())}
    pick = rng.random()
    if pick < 0.15:
        return ctx, UnitVal(), rng.choice([Unit(), t_x])
    if pick < 0.3:
        return ctx, Name("a"), rng.choice([Chan(Unit()), Chan(End()), Unit()])
    if pick < 0.55:
        return ctx, Name("x"), t_x
    if pick < 0.75:
        return ctx, Name("x"), unfold(t_x)
    for _ in range(20):
        t = _gen_type(rng, cfg, rng.randint(0, cfg.max_depth), (), frozenset())
        if equiv(t_x, t) or not (subtype(t_x, t) or subtype(t, t_x)):
            return ctx, Name("x"), t
    return ctx, Name("x"), t_x


# ---------------------------------------------------------------------------
# reports


@dataclass
class CorrespondenceReport:
    check: str
    ok: bool
    seed: int | None = None
    counterexample: str | None = None
    detail: str = ""
    session_trace: list = field(default_factory=list)
    pi_trace: list = field(default_factory=list)
    checked: int = 0

    def line(self) -> str:
        head = f"{'PASS' if self.ok else 'FAIL'} {self.check} seed={self.seed}"
        if self.ok:
            return head
        out = [head]
        if self.detail:
            out.append(f"  {self.detail}")
        if self.counterexample:
            out.append(f"  counterexample: {self.counterexample}")
        return "\n".join(out)

    def as_dict(self) -> dict:
        return {
            "check": self.check, "ok": self.ok, "seed": self.seed,
            "counterexample": self.counterexample, "detail": self.detail,
            "session_trace": self.session_trace, "pi_trace": self.pi_trace,
            "checked": self.checked,
        }


# ---------------------------------------------------------------------------
# type-level properties


def prop_complement_dual(t) -> bool:
    """The complement of a session type is dual to it."""
    return _dual_any(t, complement_session(t))


def prop_duality_idempotent(t, s, u) -> bool:
    """Duality composes to equivalence: ``t ⊥ s`` and ``s ⊥ u`` give ``t = u``."""
    if _dual_any(t, s) and _dual_any(s, u):
        return equiv(t, u)
    return True


def prop_double_complement(t) -> bool:
    return equiv(t, complement_session(complement_session(t)))


def _pi_complementable(t) -> bool:
    return not isinstance(unfold(t), Chan)


def prop_pi_complement_dual(tau) -> bool:
    return _dual_any(tau, complement_pi(tau))


def prop_pi_double_complement(tau) -> bool:
    return equiv(tau, complement_pi(complement_pi(tau)))


def lemma_equal_encoding(t, s) -> bool:
    """Equivalent session types encode to equivalent pi types."""
    if not equiv(t, s):
        return True
    return equiv(encode_type(t), encode_type(s))


def lemma_dual_encoding(t, s) -> bool:
    """Dual session types have dual encoded unfoldings."""
    if not _dual_any(t, s):
        return True
    return _dual_any(encode_type(unfold(t)), encode_type(unfold(s)))


def lemma_value_typing(ctx: dict, v, t) -> tuple[bool, bool]:
    """Verdicts of ``ctx ⊢ v : t`` and of its encoding."""
    try:
        check_value(ctx, v, t)
        left = True
    except TypingError:
        left = False
    try:
        check_pi_value(encode_env(ctx), encode_value(v, {}), encode_type(t))
        right = True
    except TypingError:
        right = False
    return left, right


def equivalent_variants(t) -> list:
    """Types equivalent to ``t`` but spelled differently: unfoldings and a rolled copy."""
    out = [unfold(t)]
    if isinstance(t, Rec):
        out.append(Rec(t.var + "1", _rename_var(t.body, t.var, t.var + "1")))
    u = unfold(t)
    if isinstance(u, (Send, Recv)):
        out.append(type(u)(u.carried, unfold(u.cont)))
    return out


def _rename_var(t, old, new):
    from .algebra import subst
    return subst(t, old, TVar(new), TVar(new, True))


# ---------------------------------------------------------------------------
# process-level checks


def check_typing_theorem(ctx: dict, p) -> tuple[bool, bool]:
    """Verdicts of ``ctx ⊢ p`` and of the encoded judgement."""
    left = typechecks(ctx, p)
    try:
        q = encode(p, ctx)
    except Exception:
        return left, False
    return left, pi_typechecks(encode_env(ctx), q)


def _explore(p, depth: int, stepper, limit: int = 60):
    """Transitions ``(state, step)`` reachable within ``depth`` steps, states deduplicated."""
    seen = {canonical_key(p)}
    frontier = [p]
    out = []
    for _ in range(depth):
        nxt = []
        for q in frontier:
            for s in stepper(q):
                out.append((q, s))
                if isinstance(s.process, Fault):
                    continue
                k = canonical_key(s.process)
                if k not in seen and len(seen) < limit:
                    seen.add(k)
                    nxt.append(s.process)
        frontier = nxt
    return out


def _pi_reaches(start, target, budget: int) -> list | None:
    """A run of 1..budget pi steps from ``start`` ending hook-equivalent to ``target``."""
    frontier = [(start, [])]
    seen = {canonical_key(start)}
    for _ in range(budget):
        nxt = []
        for q, path in frontier:
            for s in step_pi(q):
                if isinstance(s.process, Fault):
                    continue
                run = path + [f"{s.rule} at {s.location}"]
                if hook_equiv(s.process, target):
                    return run
                k = canonical_key(s.process)
                if k not in seen:
                    seen.add(k)
                    nxt.append((s.process, run))
        frontier = nxt
    return None


PI_BUDGET = 4


def check_soundness(p, depth: int, ctx: dict | None = None, seed=None,
                    budget: int = PI_BUDGET) -> CorrespondenceReport:
    """Every session step is matched by pi steps from the encoding (then ``↪``)."""
    ctx = dict(ctx or {})
    report = CorrespondenceReport("soundness", True, seed)
    for q, s in _explore(p, depth, step_session):
        report.checked += 1
        run = _pi_reaches(encode(q, ctx), encode(s.process, ctx), budget)
        report.session_trace.append(f"{s.rule} at {s.location}")
        if run is None:
            report.ok = False
            report.counterexample = pretty(q)
            report.detail = (f"session step {s.rule} at {s.location} has no pi match "
                             f"within {budget} steps")
            return report
        report.pi_trace.append(run)
    return report


def check_completeness(p, ctx: dict | None = None, seed=None) -> CorrespondenceReport:
    """Every pi step of the encoding is matched, up to ``↪``, by some session step."""
    ctx = dict(ctx or {})
    report = CorrespondenceReport("completeness", True, seed)
    targets = [(s, encode(s.process, ctx)) for s in step_session(p)]
    for t in step_pi(encode(p, ctx)):
        report.checked += 1
        if isinstance(t.process, Fault):
            report.ok = False
            report.counterexample = pretty(p)
            report.detail = f"pi step faulted: {t.process.message}"
            return report
        match = next((s for s, e in targets if hook_equiv(t.process, e)), None)
        if match is None:
            report.ok = False
            report.counterexample = pretty(p)
            report.detail = f"pi step {t.rule} at {t.location} matches no session step"
            return report
        report.pi_trace.append(f"{t.rule} at {t.location}")
        report.session_trace.append(f"{match.rule} at {match.location}")
    return report


def check_subject_reduction(p, depth: int, ctx: dict | None = None, seed=None
                            ) -> CorrespondenceReport:
    """Residuals of session steps and of the encoding's pi steps stay well typed."""
    ctx = dict(ctx or {})
    report = CorrespondenceReport("subject-reduction", True, seed)
    for _q, s in _explore(p, depth, step_session):
        report.checked += 1
        if not typechecks(ctx, s.process):
            report.ok, report.counterexample = False, pretty(s.process)
            report.detail = f"session residual after {s.rule} at {s.location} rejected"
            return report
    pi_ctx = encode_env(ctx)
    for _q, s in _explore(encode(p, ctx), depth, step_pi):
        report.checked += 1
        if isinstance(s.process, Fault) or not pi_typechecks(pi_ctx, s.process):
            report.ok = False
            report.counterexample = (s.process.message if isinstance(s.process, Fault)
                                     else pretty(s.process))
            report.detail = f"pi residual after {s.rule} at {s.location} rejected"
            return report
    return report


def check_theorem_one(ctx: dict, p, seed=None, label="typing") -> CorrespondenceReport:
    left, right = check_typing_theorem(ctx, p)
    report = CorrespondenceReport(label, left == right, seed, checked=1)
    if left != right:
        report.counterexample = pretty(p)
        report.detail = f"session verdict {left}, pi verdict {right}"
    return report


def run_corpus(n: int, seed: int = 0, depth: int = 3,
               checks: Iterable[str] = ("typing", "mutants", "soundness", "completeness",
                                        "subject-reduction")) -> list[CorrespondenceReport]:
    """Run the process-level checks over a generated corpus; one report per check and process."""
    checks = set(checks)
    out = []
    for s, ctx, p in process_corpus(n, seed):
        if "typing" in checks:
            out.append(check_theorem_one(ctx, p, s))
        if "mutants" in checks:
            for m in mutants(p):
                out.append(check_theorem_one(ctx, m, s, "typing-mutant"))
        if "soundness" in checks:
            out.append(check_soundness(p, depth, ctx, s))
        if "completeness" in checks:
            out.append(check_completeness(p, ctx, s))
        if "subject-reduction" in checks:
            out.append(check_subject_reduction(p, depth, ctx, s))
    return out
