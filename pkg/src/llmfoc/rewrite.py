"""Decomposition of focusing phases, lowering of spent foci, and cut elimination.

The engine reduces one cut at a time, innermost first.  A linear cut is
first *decomposed*: the part of the first derivation that treats the cut
focus is split from an open suffix that treats the other foci; the spent
foci of that part are lowered, the cut is resolved against the second
derivation by case analysis, and the suffix is replayed on top.  Each case
analysis spawns only cuts that are strictly smaller in the lexicographic
order ``(size of cut formula, kind rank, combined premise size)``, and the
engine asserts this at every spawn.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .kernel import (
    CUT_RULES, FOC, INV, Derivation, STRICT, Sequent, check, check_node, dsize,
    focus_viable, focused, foci, format_path, is_spent, item_ctx, lower_ctx, mk_bot,
    mk_decide, mk_par, mk_plus, mk_quest, mk_release, mk_tensor, mk_top, mk_with, ms,
    ms_remove, ms_sub, passive, premise_sequents, weaken,
)
from .syntax import TOP, Formula, dual, fsize


class RewriteError(ValueError):
    pass


class InvalidInput(RewriteError):
    pass


class IllFormedCut(RewriteError):
    pass


class Stuck(RewriteError):
    """No reduction case applies; only reachable through an engine bug."""


class TerminationError(RewriteError):
    pass


# -- decomposition ------------------------------------------------------------

@dataclass(frozen=True)
class TensorStep:
    """Rebuild a tensor on ``[sub (x) other]`` with a fixed sibling premise."""

    sub: Formula
    other: Formula
    sibling: Derivation
    plugged_left: bool

    @property
    def size(self) -> int:
        return 1 + dsize(self.sibling)

    def apply(self, d: Derivation) -> Derivation:
        if self.plugged_left:
            return mk_tensor(d, self.sibling, self.sub, self.other)
        return mk_tensor(self.sibling, d, self.other, self.sub)

    def describe(self) -> str:
        side = "left" if self.plugged_left else "right"
        return f"tensor(plug={side}, sub={self.sub}, other={self.other}, sibling_size={dsize(self.sibling)})"


@dataclass(frozen=True)
class PlusStep:
    sub: Formula
    other: Formula
    is_left: bool

    size = 1

    def apply(self, d: Derivation) -> Derivation:
        if self.is_left:
            return mk_plus(d, self.sub, self.other, True)
        return mk_plus(d, self.other, self.sub, False)

    def describe(self) -> str:
        return f"{'plusL' if self.is_left else 'plusR'}(sub={self.sub}, other={self.other})"


@dataclass(frozen=True)
class OpenDerivation:
    """A replayable recipe turning a proof of ``|= Sigma, Delta`` into one of
    ``|= Psi, Delta`` for any ``Delta``."""

    sigma: tuple
    psi: tuple
    steps: tuple = ()

    @property
    def size(self) -> int:
        """Rule instances contributed by the recipe (sibling subtrees included)."""
        return sum(s.size for s in self.steps)

    def replay(self, d: Derivation) -> Derivation:
        if d.conclusion.kind != FOC:
            raise InvalidInput("suffix replay needs a focused derivation")
        try:
            ms_sub(d.ctx, self.sigma)
        except ValueError:
            raise InvalidInput("plug-in does not contain the spent context") from None
        for step in self.steps:
            d = step.apply(d)
        return d

    def conclusion_for(self, per, delta) -> Sequent:
        return Sequent(FOC, ms(per), ms(self.psi + tuple(delta)))

    def then(self, other: "OpenDerivation") -> "OpenDerivation":
        return OpenDerivation(self.sigma, other.psi, self.steps + other.steps)


@dataclass(frozen=True)
class DecompResult:
    core: Derivation
    suffix: OpenDerivation
    sigma: tuple
    focus: Formula

    @property
    def core_focus_index(self) -> int:
        return self.core.ctx.index(focused(self.focus))


def _without(ctx, p):
    return ms_remove(ctx, focused(p))


def _principal_focus(d):
    return d.ctx[d.principal].formula


def _premise_with_focus(d, p, subs):
    # the designated focus is passed to a premise besides that premise's own sub-focus
    for i, (prem, sub) in enumerate(zip(d.premises, subs)):
        if focused(p) in ms_remove(prem.ctx, focused(sub)):
            return i
    raise Stuck(f"focus {p} not found in any premise of {d.rule}")


def _decompose(d: Derivation, p: Formula) -> DecompResult:
    psi = _without(d.ctx, p)
    if is_spent(psi):
        return DecompResult(d, OpenDerivation(psi, psi), psi, p)
    rule = d.rule
    if rule == "tensor":
        t = _principal_focus(d)
        q, r = t.args
        if t == p:
            left = _decompose(d.premises[0], q)
            right = _decompose(d.premises[1], r)
            core = mk_tensor(left.core, right.core, q, r)
            sigma = ms(left.sigma + right.sigma)
            # right suffix first (carrying the left sigma), then the left one
            suffix = OpenDerivation(sigma, psi, right.suffix.steps + left.suffix.steps)
            return DecompResult(core, suffix, sigma, p)
        i = _premise_with_focus(d, p, (q, r))
        inner = _decompose(d.premises[i], p)
        sibling = d.premises[1 - i]
        step = TensorStep(q if i == 0 else r, r if i == 0 else q, sibling, i == 0)
        suffix = OpenDerivation(inner.sigma, psi, inner.suffix.steps + (step,))
        return DecompResult(inner.core, suffix, inner.sigma, p)
    if rule in ("plusL", "plusR"):
        t = _principal_focus(d)
        q, r = t.args
        is_left = rule == "plusL"
        sub, other = (q, r) if is_left else (r, q)
        if t == p:
            inner = _decompose(d.premises[0], sub)
            core = mk_plus(inner.core, q, r, is_left)
            suffix = OpenDerivation(inner.sigma, psi, inner.suffix.steps)
            return DecompResult(core, suffix, inner.sigma, p)
        inner = _decompose(d.premises[0], p)
        suffix = OpenDerivation(inner.sigma, psi, inner.suffix.steps + (PlusStep(sub, other, is_left),))
        return DecompResult(inner.core, suffix, inner.sigma, p)
    if rule in CUT_RULES:
        raise InvalidInput("decomposition requires a cut-free focusing phase")
    raise Stuck(f"{rule} with unspent context around focus {p}")


def decompose(d: Derivation, focus: int, *, validate: bool = True) -> DecompResult:
    """Split a proof of ``|= Psi, [P]`` into a proof of ``|= Sigma, [P]`` (Sigma
    spent) and an open derivation from ``|= Sigma, Delta`` to ``|= Psi, Delta``.

    ``focus`` indexes the designated focus in the sorted conclusion context.
    """
    if d.conclusion.kind != FOC:
        raise InvalidInput("decomposition needs a focused sequent")
    if not 0 <= focus < len(d.ctx) or not d.ctx[focus].focus:
        raise InvalidInput(f"index {focus} does not designate a focus")
    if validate and not check(d).ok:
        raise InvalidInput("input derivation does not check")
    return _decompose(d, d.ctx[focus].formula)


# -- lowering --------------------------------------------------------------------

def _lower(d: Derivation, p: Formula) -> Derivation:
    sigma = _without(d.ctx, p)
    if not foci(sigma):
        return d
    rule = d.rule
    if rule == "release":
        return mk_release(d.premises[0], [p.args[0]])
    if rule == "tensor":
        q, r = p.args
        return mk_tensor(_lower(d.premises[0], q), _lower(d.premises[1], r), q, r)
    if rule in ("plusL", "plusR"):
        q, r = p.args
        sub = q if rule == "plusL" else r
        return mk_plus(_lower(d.premises[0], sub), q, r, rule == "plusL")
    if rule in CUT_RULES:
        raise InvalidInput("lowering requires a cut-free focusing phase")
    raise Stuck(f"{rule} cannot conclude a spent sequent with extra foci")


def lower_deriv(d: Derivation, focus: int | None = None, *, validate: bool = True) -> Derivation:
    """Turn a proof of ``|= Sigma, [P]`` (Sigma spent) into one of
    ``|= lower(Sigma), [P]`` with the same rule skeleton."""
    if d.conclusion.kind != FOC:
        raise InvalidInput("lowering needs a focused sequent")
    if focus is None:
        focus = default_focus(d)
    if not 0 <= focus < len(d.ctx) or not d.ctx[focus].focus:
        raise InvalidInput(f"index {focus} does not designate a focus")
    p = d.ctx[focus].formula
    lower_ctx(_without(d.ctx, p))          # raises NotSpentError
    if validate and not check(d).ok:
        raise InvalidInput("input derivation does not check")
    return _lower(d, p)


def default_focus(d: Derivation) -> int:
    """The unique non-up-shift focus, or the only focus."""
    idx = [i for i, it in enumerate(d.ctx) if it.focus]
    if len(idx) == 1:
        return idx[0]
    active = [i for i in idx if d.ctx[i].formula.op != "up"]
    if len(active) == 1:
        return active[0]
    raise InvalidInput("ambiguous designated focus; pass an explicit index")


# -- cut elimination -----------------------------------------------------------------

LINEAR, PERSISTENT = 0, 1
NO_CUT = (0, 0, 0)


@dataclass(frozen=True, order=True)
class CutMeasure:
    formula_size: int
    kind_rank: int
    weight: int

    def astuple(self):
        return (self.formula_size, self.kind_rank, self.weight)

    def __str__(self):
        return "({},{},{})".format(*self.astuple())


@dataclass
class TraceStep:
    name: str
    path: str
    before: CutMeasure
    after: CutMeasure | None = None

    def line(self) -> str:
        after = self.after if self.after is not None else CutMeasure(*NO_CUT)
        return f"step={self.name} path={self.path} measure={self.before} -> {after}"

    def as_dict(self) -> dict:
        after = self.after if self.after is not None else CutMeasure(*NO_CUT)
        return {"step": self.name, "path": self.path,
                "before": list(self.before.astuple()), "after": list(after.astuple())}


@dataclass
class ReductionTrace:
    steps: list = field(default_factory=list)
    coercions: list = field(default_factory=list)
    intermediates: list = field(default_factory=list)

    def lines(self) -> list[str]:
        return [s.line() for s in self.steps]

    def strictly_decreasing(self) -> bool:
        return all(s.after is None or s.after < s.before for s in self.steps)

    def as_dict(self) -> dict:
        return {"steps": [s.as_dict() for s in self.steps],
                "coercions": list(self.coercions)}

    def __len__(self):
        return len(self.steps)


def _measure(p: Formula, rank: int, d: Derivation, e: Derivation) -> CutMeasure:
    return CutMeasure(fsize(p), rank, dsize(d) + dsize(e))


class _Frame:
    """Bookkeeping for one case analysis: logs a trace line and checks that
    every spawned cut is strictly smaller."""

    def __init__(self, engine, name, measure):
        self.engine = engine
        self.measure = measure
        self.step = TraceStep(name, engine.path, measure)
        engine.trace.steps.append(self.step)

    def rename(self, name):
        self.step.name = name

    def spawn(self, child: CutMeasure):
        if not child < self.measure:
            raise TerminationError(
                f"{self.step.name}: spawned cut {child} is not smaller than {self.measure}")
        if self.step.after is None or child > self.step.after:
            self.step.after = child


class Engine:
    def __init__(self, flexible: bool = True, paranoid: bool = False, trace: ReductionTrace | None = None):
        self.flexible = flexible
        self.paranoid = paranoid
        self.trace = trace if trace is not None else ReductionTrace()
        self.path = "/"

    # ---- entry points

    def reduce(self, node: Derivation) -> Derivation:
        """Eliminate the cut at the root of ``node`` (premises must be cut-free)."""
        rule = node.rule
        d, e = node.premises if len(node.premises) == 2 else (None, None)
        if rule not in CUT_RULES:
            raise InvalidInput(f"reduce_step needs a cut at the root, found {rule}")
        if rule == "acut":
            raise InvalidInput("acut has no reduction cases")
        p = node.cut_formula
        if rule == "cut":
            if not focus_viable(node.conclusion) and not self.flexible:
                raise IllFormedCut("cut: conclusion is focus-free (use flexible mode)")
            out = self.cut(d, e, p, None)
        elif rule == "fcut":
            if not focus_viable(node.conclusion) and not self.flexible:
                raise IllFormedCut("fcut: conclusion is focus-free (use flexible mode)")
            out = self.fcut(d, e, p, None)
        else:
            out = self.persistent(d, e, p, None)
        if out.conclusion != node.conclusion:
            coerced = Sequent(INV, node.per, tuple(sorted(it.formula for it in node.ctx)))
            if out.conclusion != coerced:
                raise Stuck(f"{rule}: result concludes {out.conclusion}, expected {node.conclusion}")
            self.trace.coercions.append(f"{self.path}: {rule} result delivered as {out.conclusion}")
        return out

    # ---- helpers

    def _checked(self, d: Derivation) -> Derivation:
        if self.paranoid:
            for v in check(d).violations:
                raise RewriteError(f"paranoid check failed at {format_path(v.path)}: {v.message}")
            self.trace.intermediates.append(d)
        return d

    # ---- linear cuts with decomposition

    def cut(self, d: Derivation, e: Derivation, p: Formula, parent: _Frame | None) -> Derivation:
        """``|= Psi, [P]`` against ``|- Gamma, P^`` giving ``|= Psi, Gamma``
        (or ``|- Psi, Gamma`` when ``Psi`` has no focus)."""
        m = _measure(p, LINEAR, d, e)
        if parent is not None:
            parent.spawn(m)
        dec = _decompose(d, p)
        lowered = _lower(dec.core, p)
        frame = _Frame(self, "cut", m)
        r = self._lscut_cases(lowered, e, p, frame, prefix="cut")
        ups = [f.args[0] for f in foci(dec.sigma)]
        if not ups:
            if dec.suffix.steps:
                raise Stuck("spent context without foci but non-empty suffix")
            return self._checked(r)
        released = mk_release(r, ups)
        return self._checked(dec.suffix.replay(released))

    def fcut(self, d: Derivation, e: Derivation, p: Formula, parent: _Frame | None) -> Derivation:
        """``|= Psi, [P]`` against ``|= Xi, P^`` giving ``|= Psi, Xi``."""
        m = _measure(p, LINEAR, d, e)
        if parent is not None:
            parent.spawn(m)
        dec = _decompose(d, p)
        frame = _Frame(self, "fcut", m)
        r = self._fscut_cases(dec.core, e, p, frame, prefix="fcut")
        return self._checked(dec.suffix.replay(r))

    # ---- lowered spent cut:  |= L, [P]  vs  |- G, P^   =>   |- L, G

    def lscut(self, d, e, p, parent: _Frame) -> Derivation:
        m = _measure(p, LINEAR, d, e)
        parent.spawn(m)
        frame = _Frame(self, "lscut", m)
        return self._lscut_cases(d, e, p, frame, prefix="lscut")

    def _lscut_cases(self, d: Derivation, e: Derivation, p: Formula, frame: _Frame, prefix: str):
        np_ = dual(p)
        per = d.per
        lam = tuple(it.formula for it in d.ctx if not it.focus)
        rule = e.rule

        def name(case):
            frame.rename(f"{prefix}.{case}")

        if rule in CUT_RULES:
            raise Stuck("second premise of a cut must be cut-free")
        if e.conclusion.kind != INV:
            raise Stuck("lowered cut expects an inversion-phase second premise")
        if rule == "decide":
            prem = e.premises[0]
            chosen = [e.ctx[i] for i in e.theta]
            if np_.op == "down" and np_ in chosen:
                # up/down principal: cut the decided focus against the released premise
                name("principal-shift")
                x = np_.args[0]
                if d.rule != "release":
                    raise Stuck(f"expected release proving [{p}], found {d.rule}")
                res = self.cut(prem, d.premises[0], x, frame)
                if res.conclusion.kind == INV:
                    return self._checked(res)
                return self._checked(mk_decide(res, e.copies))
            name("boundary-decide")
            res = self.fscut(d, prem, p, frame)
            return self._checked(mk_decide(res, e.copies))
        f = e.ctx[e.principal]
        if rule == "top":
            rest = ms_remove(e.ctx, np_)
            if TOP not in rest:
                raise Stuck("top principal on the cut formula")
            name("commute-top")
            return self._checked(mk_top(per, lam + rest))
        if f == np_:
            return self._lscut_principal(d, e, p, frame, name)
        e1 = e.premises[0]
        if rule == "bot":
            name("commute-bot")
            return self._checked(mk_bot(self.lscut(d, e1, p, frame)))
        if rule == "par":
            name("commute-par")
            return self._checked(mk_par(self.lscut(d, e1, p, frame), *f.args))
        if rule == "with":
            name("commute-with")
            a = self.lscut(d, e1, p, frame)
            b = self.lscut(d, e.premises[1], p, frame)
            return self._checked(mk_with(a, b, *f.args))
        if rule == "quest":
            name("commute-quest")
            q = f.args[0]
            return self._checked(mk_quest(self.lscut(weaken(d, [q]), e1, p, frame), q))
        raise Stuck(f"no lowered-cut case for {rule}")

    def _lscut_principal(self, d, e, p, frame, name):
        rule = e.rule
        if rule == "bot":
            name("principal-one")
            if d.rule != "one":
                raise Stuck(f"expected one, found {d.rule}")
            return self._checked(e.premises[0])
        if rule == "par":
            name("principal-tensor")
            if d.rule != "tensor":
                raise Stuck(f"expected tensor, found {d.rule}")
            q, r = p.args
            first = self.lscut(d.premises[0], e.premises[0], q, frame)
            return self._checked(self.lscut(d.premises[1], first, r, frame))
        if rule == "with":
            name("principal-plus")
            if d.rule not in ("plusL", "plusR"):
                raise Stuck(f"expected plus, found {d.rule}")
            q, r = p.args
            if d.rule == "plusL":
                return self._checked(self.lscut(d.premises[0], e.premises[0], q, frame))
            return self._checked(self.lscut(d.premises[0], e.premises[1], r, frame))
        if rule == "quest":
            name("principal-bang")
            if d.rule != "bang":
                raise Stuck(f"expected bang, found {d.rule}")
            n = p.args[0]
            return self._checked(self.persistent(d.premises[0], e.premises[0], dual(n), frame))
        raise Stuck(f"no principal case for {rule}")

    # ---- spent focused cut:  |= S, [P]  vs  |= X, P^   =>   |= S, X

    def fscut(self, d, e, p, parent: _Frame) -> Derivation:
        m = _measure(p, LINEAR, d, e)
        parent.spawn(m)
        frame = _Frame(self, "fscut", m)
        return self._fscut_cases(d, e, p, frame, prefix="fscut")

    def _fscut_cases(self, d: Derivation, e: Derivation, p: Formula, frame: _Frame, prefix: str):
        np_ = passive(dual(p))
        rule = e.rule

        def name(case):
            frame.rename(f"{prefix}.{case}")

        if rule == "ax":
            name("axiom")
            if d.rule != "ax":
                raise Stuck(f"expected ax proving [{p}], found {d.rule}")
            return self._checked(d)
        if rule == "tensor":
            name("commute-tensor")
            q, r = _principal_focus(e).args
            if np_ in e.premises[0].ctx:
                res = self.fscut(d, e.premises[0], p, frame)
                return self._checked(mk_tensor(res, e.premises[1], q, r))
            res = self.fscut(d, e.premises[1], p, frame)
            return self._checked(mk_tensor(e.premises[0], res, q, r))
        if rule in ("plusL", "plusR"):
            name("commute-plus")
            q, r = _principal_focus(e).args
            res = self.fscut(d, e.premises[0], p, frame)
            return self._checked(mk_plus(res, q, r, rule == "plusL"))
        if rule == "release":
            name("boundary-release")
            sigma = _without(d.ctx, p)
            lowered = _lower(d, p)
            res = self.lscut(lowered, e.premises[0], p, frame)
            delta = [f.args[0] for f in foci(sigma)] + [f.args[0] for f in foci(e.ctx)]
            return self._checked(mk_release(res, delta))
        raise Stuck(f"no focused-cut case for {rule}")

    # ---- persistent cuts:  |- P^  vs  a derivation over Per, P

    def persistent(self, d: Derivation, e: Derivation, p: Formula, parent: _Frame | None) -> Derivation:
        m = _measure(p, PERSISTENT, d, e)
        if parent is not None:
            parent.spawn(m)
        frame = _Frame(self, f"bang.{e.rule}", m)
        new_per = ms_remove(e.per, p)
        dw = weaken(d, ms_sub(new_per, d.per))
        if e.rule == "decide":
            prem = self.persistent(d, e.premises[0], p, frame)
            copies = e.copies or ()
            if p in new_per or p not in copies:
                return self._checked(mk_decide(prem, copies))
            frame.rename("bang.decide-copies")
            res = prem
            for _ in range(copies.count(p)):
                if res.conclusion.kind != FOC:
                    raise Stuck("copy focus vanished before all copies were cut")
                res = self.cut(res, dw, p, frame)
            if res.conclusion.kind == INV:
                return self._checked(res)
            rest = list(copies)
            for _ in range(copies.count(p)):
                rest.remove(p)
            return self._checked(mk_decide(res, rest))
        prems = tuple(self.persistent(d, sub, p, frame) for sub in e.premises)
        node = replace(e, conclusion=e.conclusion.with_per(new_per), premises=prems)
        return self._checked(node)


# -- public API ---------------------------------------------------------------------

def _tolerable(node: Derivation, flexible: bool, root: bool) -> list:
    """Check violations, ignoring focus-viability of a root cut in flexible mode."""
    out = []
    for v in check(node).violations:
        if (flexible and root and v.path == () and node.rule in ("cut", "fcut")
                and v.clause == "conclusion must be focus-viable"):
            continue
        out.append(v)
    return out


def reduce_step(d: Derivation, flexible: bool = False, paranoid: bool = False,
                trace: ReductionTrace | None = None) -> Derivation:
    """Replace the cut at the root of ``d`` (both premises cut-free)."""
    if d.rule not in CUT_RULES:
        raise InvalidInput(f"reduce_step is only defined at cut roots, found {d.rule}")
    if any(n.rule in CUT_RULES for p in d.premises for n in _nodes(p)):
        raise InvalidInput("premises of the reduced cut must be cut-free")
    if d.rule in ("cut", "fcut") and not focus_viable(d.conclusion) and not flexible:
        raise IllFormedCut(f"{d.rule}: conclusion must be focus-viable")
    bad = _tolerable(d, flexible, True)
    if bad:
        raise InvalidInput(f"input does not check: {bad[0]}")
    engine = Engine(flexible=flexible, paranoid=paranoid, trace=trace)
    return engine.reduce(d)


def _nodes(d):
    yield d
    for p in d.premises:
        yield from _nodes(p)


def normalize(d: Derivation, flexible: bool = False, paranoid: bool = False,
              trace: bool = True) -> tuple[Derivation, ReductionTrace]:
    """Eliminate every cut, innermost first."""
    if d.rule in ("cut", "fcut") and not focus_viable(d.conclusion) and not flexible:
        raise IllFormedCut(f"{d.rule}: conclusion must be focus-viable")
    bad = _tolerable(d, flexible, True)
    if bad:
        raise InvalidInput(f"input does not check: {bad[0]}")
    tr = ReductionTrace()
    engine = Engine(flexible=flexible, paranoid=paranoid, trace=tr)
    out = _normalize(d, (), engine)
    if not trace:
        tr.steps.clear()
    return out, tr


def _normalize(d: Derivation, path: tuple, engine: Engine) -> Derivation:
    if not d.premises:
        return d
    prems = tuple(_normalize(p, path + (i,), engine) for i, p in enumerate(d.premises))
    node = d if prems == d.premises else replace(d, premises=prems)
    if node.rule not in CUT_RULES:
        return node
    engine.path = format_path(path)
    out = engine.reduce(node)
    if engine.paranoid:
        for v in check(out).violations:
            raise RewriteError(f"paranoid check failed after reducing {engine.path}: {v}")
    if path and out.conclusion != d.conclusion:
        raise Stuck("inner cut changed its conclusion")
    return out
