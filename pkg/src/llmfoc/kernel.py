"""Sequents, derivation trees and the local rule checker.

Contexts are multisets kept as canonically sorted tuples.  A focused
context holds :class:`Item` values: ``Item(False, N)`` is a passive negative
formula and ``Item(True, P)`` is a focus ``[P]``.  Passives sort before foci.

Every :class:`Derivation` node stores its whole conclusion together with
the small amount of rule data needed to recompute its premises (which
formula is principal, how a tensor splits its context, what a decide step
selects).  :func:`check` recomputes the premises of each node from its
conclusion and data and compares them with the conclusions of the actual
sub-derivations.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from itertools import product
from typing import Iterator, NamedTuple

from .syntax import BOT, ONE, TOP, Formula, atom, bang, down, dual, natom, par, plus, quest, tensor, up, with_

INV, FOC = "inv", "foc"

FOCUS_RULES = ("ax", "one", "tensor", "plusL", "plusR", "bang", "release")
INV_RULES = ("bot", "par", "top", "with", "quest", "decide")
CUT_RULES = ("cut", "fcut", "cutBang", "fcutBang", "acut")
RULES = FOCUS_RULES + INV_RULES + CUT_RULES

ARITY = {
    "ax": 0, "one": 0, "top": 0,
    "release": 1, "bot": 1, "par": 1, "quest": 1, "decide": 1,
    "plusL": 1, "plusR": 1, "bang": 1,
    "tensor": 2, "with": 2, "cut": 2, "fcut": 2, "cutBang": 2,
    "fcutBang": 2, "acut": 2,
}

STRICT, EXPERIMENTAL = "strict", "experimental"


class Item(NamedTuple):
    focus: bool
    formula: Formula

    def __str__(self):
        return f"[{self.formula}]" if self.focus else str(self.formula)


def passive(n: Formula) -> Item:
    return Item(False, n)


def focused(p: Formula) -> Item:
    return Item(True, p)


# -- multisets --------------------------------------------------------------

def ms(items) -> tuple:
    return tuple(sorted(items))


def ms_add(ctx: tuple, *items) -> tuple:
    return tuple(sorted(ctx + tuple(items)))


def ms_remove(ctx: tuple, x) -> tuple:
    """Remove one occurrence of ``x``; raises ``ValueError`` if absent."""
    i = ctx.index(x)
    return ctx[:i] + ctx[i + 1:]


def ms_sub(ctx: tuple, other) -> tuple:
    out = ctx
    for x in other:
        out = ms_remove(out, x)
    return out


def ms_contains(ctx: tuple, other) -> bool:
    have = Counter(ctx)
    need = Counter(other)
    return all(have[k] >= v for k, v in need.items())


def canonical_indices(ctx: tuple, chosen) -> tuple:
    """Earliest indices of ``ctx`` realising the sub-multiset ``chosen``."""
    used = set()
    out = []
    for x in sorted(chosen):
        for i, y in enumerate(ctx):
            if i not in used and y == x:
                used.add(i)
                out.append(i)
                break
        else:
            raise ValueError(f"{x} does not occur in context")
    return tuple(sorted(out))


# -- sequents ---------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Sequent:
    """``Inv(per, ctx)`` is |- Per : Gamma, ``Foc(per, ctx)`` is |= Per : Psi."""

    kind: str
    per: tuple
    ctx: tuple

    @property
    def focused(self) -> bool:
        return self.kind == FOC

    def foci(self) -> tuple:
        return foci(self.ctx) if self.kind == FOC else ()

    def with_per(self, per) -> "Sequent":
        return Sequent(self.kind, ms(per), self.ctx)

    def __str__(self):
        turn = "|=" if self.kind == FOC else "|-"
        per = ", ".join(map(str, self.per)) or "."
        ctx = ", ".join(map(str, self.ctx)) or "."
        return f"{turn} {per} : {ctx}"


def Inv(per=(), ctx=()) -> Sequent:
    return Sequent(INV, ms(per), ms(ctx))


def Foc(per=(), ctx=()) -> Sequent:
    return Sequent(FOC, ms(per), ms(ctx))


def foci(ctx) -> tuple:
    return tuple(it.formula for it in ctx if it.focus)


def passives(ctx) -> tuple:
    return tuple(it.formula for it in ctx if not it.focus)


def focus_viable(s: Sequent) -> bool:
    return s.kind != FOC or any(it.focus for it in s.ctx)


def is_spent(ctx) -> bool:
    return all(not it.focus or it.formula.op == "up" for it in ctx)


class NotSpentError(ValueError):
    pass


def neutralise(psi) -> tuple:
    """``<Gamma> = Gamma`` and ``<Psi, [P]> = <Psi>, down P``."""
    return ms(down(it.formula) if it.focus else it.formula for it in psi)


def lower_ctx(sigma) -> tuple:
    """Invert spent foci: ``[up N]`` becomes ``N``."""
    if not is_spent(sigma):
        bad = next(it for it in sigma if it.focus and it.formula.op != "up")
        raise NotSpentError(f"context is not spent: focus {bad} is not an up-shift")
    return ms(it.formula.args[0] if it.focus else it.formula for it in sigma)


def activation_paths(psi) -> list:
    """One result per way of applying the activation rules: each ``down P``
    passive occurrence independently stays or becomes ``[P]``."""
    choices = []
    for it in psi:
        if not it.focus and it.formula.op == "down":
            choices.append((it, focused(it.formula.args[0])))
        else:
            choices.append((it,))
    return [ms(c) for c in product(*choices)]


def activations(psi) -> set:
    """All contexts reachable by promoting any ``down P`` passives to ``[P]``."""
    return set(activation_paths(psi))


def item_ctx(gamma) -> tuple:
    """A negative context viewed as a focused context of passives."""
    return ms(passive(n) for n in gamma)


# -- derivations ------------------------------------------------------------

@dataclass(frozen=True)
class Derivation:
    rule: str
    conclusion: Sequent
    premises: tuple = ()
    principal: int | None = None
    left: tuple | None = None
    copies: tuple | None = None
    theta: tuple | None = None
    cut_formula: Formula | None = None
    activated: tuple | None = None
    _size: int = field(default=0, init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_size", 1 + sum(p._size for p in self.premises))

    @property
    def per(self):
        return self.conclusion.per

    @property
    def ctx(self):
        return self.conclusion.ctx


def dsize(d: Derivation) -> int:
    """Number of rule instances."""
    return d._size


def dheight(d: Derivation) -> int:
    """Node count of the longest root-to-leaf path."""
    return 1 + max((dheight(p) for p in d.premises), default=0)


def is_cut_free(d: Derivation) -> bool:
    return all(n.rule not in CUT_RULES for _, n in iter_nodes(d))


def iter_nodes(d: Derivation, path: tuple = ()) -> Iterator[tuple[tuple, Derivation]]:
    stack = [(path, d)]
    while stack:
        p, n = stack.pop()
        yield p, n
        for i in range(len(n.premises) - 1, -1, -1):
            stack.append((p + (i,), n.premises[i]))


def format_path(path) -> str:
    return "/" + "/".join(map(str, path))


def subtree(d: Derivation, path) -> Derivation:
    for i in path:
        d = d.premises[i]
    return d


def replace_at(d: Derivation, path, new: Derivation) -> Derivation:
    if not path:
        return new
    i = path[0]
    prems = list(d.premises)
    prems[i] = replace_at(prems[i], path[1:], new)
    return replace(d, premises=tuple(prems))


def skeleton(d: Derivation):
    """The rule-name tree with branching, ignoring sequents."""
    return (d.rule, tuple(skeleton(p) for p in d.premises))


def weaken(d: Derivation, extra) -> Derivation:
    """Add ``extra`` to the persistent context of every node."""
    extra = tuple(extra)
    if not extra:
        return d
    return replace(
        d,
        conclusion=d.conclusion.with_per(d.per + extra),
        premises=tuple(weaken(p, extra) for p in d.premises),
    )


# -- checking ---------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    path: tuple
    rule: str
    clause: str

    @property
    def message(self) -> str:
        return f"{self.rule}: {self.clause}"

    def __str__(self):
        return f"{format_path(self.path)}: {self.message}"


@dataclass
class CheckReport:
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations

    def messages(self) -> list[str]:
        return [v.message for v in self.violations]

    def __bool__(self):
        return self.ok


class _Bad(Exception):
    pass


def _principal(node, kind_ops, what):
    i = node.principal
    ctx = node.ctx
    if i is None or not 0 <= i < len(ctx):
        raise _Bad(f"principal index out of range")
    f = ctx[i]
    if node.conclusion.kind == FOC:
        if not f.focus or f.formula.op not in kind_ops:
            raise _Bad(f"principal item must be a focus on {what}")
        return f.formula, ctx[:i] + ctx[i + 1:]
    if f.op not in kind_ops:
        raise _Bad(f"principal formula must be {what}")
    return f, ctx[:i] + ctx[i + 1:]


def _split(rest, idx, what="left"):
    if idx is None:
        raise _Bad(f"missing {what} partition")
    if len(set(idx)) != len(idx) or any(not 0 <= i < len(rest) for i in idx):
        raise _Bad(f"invalid {what} partition indices")
    chosen = set(idx)
    return (tuple(rest[i] for i in sorted(chosen)),
            tuple(x for i, x in enumerate(rest) if i not in chosen))


def premise_sequents(node: Derivation, mode: str = STRICT) -> tuple[list, list]:
    """Recompute the premises of ``node`` from its conclusion and rule data.

    Returns ``(premises, clauses)``; ``premises`` is ``None`` when the rule
    instance is too malformed to reconstruct them.
    """
    rule, s = node.rule, node.conclusion
    per, ctx = s.per, s.ctx
    clauses = []
    want_kind = {**{r: FOC for r in FOCUS_RULES}, **{r: INV for r in INV_RULES},
                 "cut": FOC, "fcut": FOC, "cutBang": INV, "fcutBang": FOC, "acut": FOC}
    if rule not in want_kind:
        return None, [f"unknown rule"]
    if s.kind != want_kind[rule]:
        return None, [f"conclusion must be a {'focused' if want_kind[rule] == FOC else 'inversion'} sequent"]
    try:
        if rule == "ax":
            if (len(ctx) != 2 or ctx[0].focus or not ctx[1].focus
                    or ctx[0].formula.op != "natom" or ctx[1].formula.op != "atom"):
                raise _Bad("conclusion must be a^⊥, [a]")
            if ctx[0].formula.name != ctx[1].formula.name:
                raise _Bad("atom mismatch")
            return [], clauses
        if rule == "one":
            if ctx != (focused(ONE),):
                raise _Bad("conclusion must be exactly [1]")
            return [], clauses
        if rule == "bang":
            if len(ctx) != 1 or not ctx[0].focus or ctx[0].formula.op != "bang":
                raise _Bad("conclusion must be exactly [!N]")
            return [Inv(per, (ctx[0].formula.args[0],))], clauses
        if rule == "release":
            if any(it.focus and it.formula.op != "up" for it in ctx):
                clauses.append("only ⇑ foci may be present")
            delta = [it.formula.args[0] for it in ctx if it.focus and it.formula.op == "up"]
            if not delta:
                clauses.append("Δ must be non-empty")
            return [Inv(per, passives(ctx) + tuple(delta))], clauses
        if rule == "tensor":
            p, rest = _principal(node, ("tensor",), "a tensor")
            left, right = _split(rest, node.left)
            return [Foc(per, left + (focused(p.args[0]),)),
                    Foc(per, right + (focused(p.args[1]),))], clauses
        if rule in ("plusL", "plusR"):
            p, rest = _principal(node, ("plus",), "a plus")
            sub = p.args[0] if rule == "plusL" else p.args[1]
            return [Foc(per, rest + (focused(sub),))], clauses
        if rule == "bot":
            _, rest = _principal(node, ("bot",), "⊥")
            return [Inv(per, rest)], clauses
        if rule == "par":
            f, rest = _principal(node, ("par",), "a par")
            return [Inv(per, rest + f.args)], clauses
        if rule == "top":
            _principal(node, ("top",), "⊤")
            return [], clauses
        if rule == "with":
            f, rest = _principal(node, ("with",), "a with")
            return [Inv(per, rest + (f.args[0],)), Inv(per, rest + (f.args[1],))], clauses
        if rule == "quest":
            f, rest = _principal(node, ("quest",), "a ?-formula")
            return [Inv(per + (f.args[0],), rest)], clauses
        if rule == "decide":
            theta_idx = node.theta or ()
            copies = node.copies or ()
            if len(set(theta_idx)) != len(theta_idx) or any(
                    not 0 <= i < len(ctx) for i in theta_idx):
                raise _Bad("invalid Θ indices")
            if any(ctx[i].op != "down" for i in theta_idx):
                raise _Bad("Θ must select ⇓-formulas")
            if any(c not in per for c in copies):
                clauses.append("copies must occur in Per")
            if any(not c.positive for c in copies):
                raise _Bad("copies must be positive")
            if not theta_idx and not copies:
                clauses.append("Per^{vec n} or Θ must be non-empty")
            chosen = set(theta_idx)
            rest = tuple(passive(f) for i, f in enumerate(ctx) if i not in chosen)
            fs = tuple(focused(ctx[i].args[0]) for i in theta_idx)
            fs += tuple(focused(c) for c in copies)
            return [Foc(per, rest + fs)], clauses
        # cut family
        p = node.cut_formula
        if p is None or not p.positive:
            raise _Bad("cut formula must be a positive formula")
        if rule == "cutBang":
            return [Inv(per, (dual(p),)), Inv(per + (p,), ctx)], clauses
        if rule == "fcutBang":
            return [Inv(per, (dual(p),)), Foc(per + (p,), ctx)], clauses
        if rule == "acut":
            if mode != EXPERIMENTAL:
                clauses.append("only admitted in experimental mode")
            act = node.activated or ()
            if len(set(act)) != len(act) or any(
                    not 0 <= i < len(ctx) or not ctx[i].focus for i in act):
                raise _Bad("activation witness must select foci")
            pre = tuple(passive(down(it.formula)) if i in set(act) else it
                        for i, it in enumerate(ctx))
            left, right = _split(pre, node.left)
            if any(it.focus for it in right):
                raise _Bad("second-premise context must be focus-free")
            return [Foc(per, left + (focused(p),)),
                    Inv(per, passives(right) + (dual(p),))], clauses
        left, right = _split(ctx, node.left)
        if rule == "cut":
            if any(it.focus for it in right):
                raise _Bad("second-premise context must be focus-free")
            return [Foc(per, left + (focused(p),)),
                    Inv(per, passives(right) + (dual(p),))], clauses
        return [Foc(per, left + (focused(p),)),
                Foc(per, right + (passive(dual(p)),))], clauses
    except _Bad as exc:
        return None, clauses + [str(exc)]


def _well_formed(s: Sequent) -> list[str]:
    out = []
    if any(not f.positive for f in s.per):
        out.append("persistent context must hold positive formulas")
    if s.kind == INV:
        if any(not isinstance(f, Formula) or f.positive for f in s.ctx):
            out.append("inversion context must hold negative formulas")
    else:
        for it in s.ctx:
            if not isinstance(it, Item):
                out.append("focused context must hold items")
                break
            if it.focus != it.formula.positive:
                out.append("foci must be positive and passives negative")
                break
        if not focus_viable(s):
            out.append("conclusion must be focus-viable")
    return out


def check_node(node: Derivation, mode: str = STRICT) -> list[str]:
    """Clauses violated by ``node`` locally (premise conclusions included)."""
    clauses = _well_formed(node.conclusion)
    if node.rule not in ARITY:
        return clauses + ["unknown rule"]
    prems, more = premise_sequents(node, mode)
    clauses += more
    if len(node.premises) != ARITY[node.rule]:
        clauses.append(f"expected {ARITY[node.rule]} premise(s)")
    elif prems is not None:
        for i, (want, sub) in enumerate(zip(prems, node.premises)):
            if want != sub.conclusion:
                clauses.append(f"premise {i} conclusion mismatch")
    return clauses


def check(d: Derivation, mode: str = STRICT) -> CheckReport:
    violations = []
    for path, node in iter_nodes(d):
        for clause in check_node(node, mode):
            violations.append(Violation(path, node.rule, clause))
    return CheckReport(violations)


# -- smart constructors -------------------------------------------------------
# Each builds a node from its premises, computing the conclusion and the
# canonical rule data.

def _rebuild_focus(ctx, item):
    return canonical_indices(ctx, [item])[0]


def mk_ax(per, name: str) -> Derivation:
    return Derivation("ax", Foc(per, (passive(natom(name)), focused(atom(name)))))


def mk_one(per=()) -> Derivation:
    return Derivation("one", Foc(per, (focused(ONE),)))


def mk_bang(prem: Derivation) -> Derivation:
    (n,) = prem.ctx
    return Derivation("bang", Foc(prem.per, (focused(bang(n)),)), (prem,))


def mk_release(prem: Derivation, delta) -> Derivation:
    rest = ms_sub(prem.ctx, delta)
    items = tuple(passive(n) for n in rest) + tuple(focused(up(n)) for n in delta)
    return Derivation("release", Foc(prem.per, items), (prem,))


def mk_decide(prem: Derivation, copies=()) -> Derivation:
    """Close a focused premise; foci not listed as copies become ``down``-formulas."""
    copies = ms(copies)
    rest = ms_sub(prem.ctx, [focused(c) for c in copies])
    theta = [it.formula for it in rest if it.focus]
    gamma = ms([it.formula for it in rest if not it.focus] + [down(p) for p in theta])
    idx = canonical_indices(gamma, [down(p) for p in theta])
    return Derivation("decide", Sequent(INV, prem.per, gamma), (prem,),
                      copies=copies, theta=idx)


def mk_tensor(p1: Derivation, p2: Derivation, q: Formula, r: Formula) -> Derivation:
    left = ms_remove(p1.ctx, focused(q))
    right = ms_remove(p2.ctx, focused(r))
    f = focused(tensor(q, r))
    ctx = ms(left + right + (f,))
    i = _rebuild_focus(ctx, f)
    rest = ctx[:i] + ctx[i + 1:]
    return Derivation("tensor", Sequent(FOC, p1.per, ctx), (p1, p2),
                      principal=i, left=canonical_indices(rest, left))


def mk_plus(prem: Derivation, q: Formula, r: Formula, left: bool) -> Derivation:
    sub = q if left else r
    f = focused(plus(q, r))
    ctx = ms_add(ms_remove(prem.ctx, focused(sub)), f)
    return Derivation("plusL" if left else "plusR", Sequent(FOC, prem.per, ctx), (prem,),
                      principal=_rebuild_focus(ctx, f))


def mk_top(per, ctx) -> Derivation:
    ctx = ms(ctx)
    return Derivation("top", Sequent(INV, ms(per), ctx), principal=ctx.index(TOP))


def _unary_inv(rule, prem, removed, added):
    ctx = ms_add(ms_sub(prem.ctx, removed), added)
    return Derivation(rule, Sequent(INV, prem.per, ctx), (prem,),
                      principal=ctx.index(added))


def mk_bot(prem: Derivation) -> Derivation:
    return _unary_inv("bot", prem, (), BOT)


def mk_par(prem: Derivation, n: Formula, m: Formula) -> Derivation:
    return _unary_inv("par", prem, (n, m), par(n, m))


def mk_with(p1: Derivation, p2: Derivation, n: Formula, m: Formula) -> Derivation:
    f = with_(n, m)
    ctx = ms_add(ms_remove(p1.ctx, n), f)
    return Derivation("with", Sequent(INV, p1.per, ctx), (p1, p2), principal=ctx.index(f))


def mk_quest(prem: Derivation, p: Formula) -> Derivation:
    f = quest(p)
    ctx = ms_add(prem.ctx, f)
    return Derivation("quest", Sequent(INV, ms_remove(prem.per, p), ctx), (prem,),
                      principal=ctx.index(f))


def mk_cut(d: Derivation, e: Derivation, p: Formula) -> Derivation:
    psi = ms_remove(d.ctx, focused(p))
    gamma = item_ctx(ms_remove(e.ctx, dual(p)))
    ctx = ms(psi + gamma)
    return Derivation("cut", Sequent(FOC, d.per, ctx), (d, e),
                      left=canonical_indices(ctx, psi), cut_formula=p)


def mk_fcut(d: Derivation, e: Derivation, p: Formula) -> Derivation:
    psi = ms_remove(d.ctx, focused(p))
    xi = ms_remove(e.ctx, passive(dual(p)))
    ctx = ms(psi + xi)
    return Derivation("fcut", Sequent(FOC, d.per, ctx), (d, e),
                      left=canonical_indices(ctx, psi), cut_formula=p)


def mk_cut_bang(d: Derivation, e: Derivation, p: Formula) -> Derivation:
    return Derivation("cutBang", Sequent(INV, d.per, e.ctx), (d, e), cut_formula=p)


def mk_fcut_bang(d: Derivation, e: Derivation, p: Formula) -> Derivation:
    return Derivation("fcutBang", Sequent(FOC, d.per, e.ctx), (d, e), cut_formula=p)


def mk_acut(d: Derivation, e: Derivation, p: Formula, activate=()) -> Derivation:
    """``acut`` whose conclusion promotes the given ``down``-passives to foci."""
    psi = ms_remove(d.ctx, focused(p))
    gamma = item_ctx(ms_remove(e.ctx, dual(p)))
    tagged = [[it, False, True] for it in psi] + [[it, False, False] for it in gamma]
    for f in activate:
        for t in tagged:
            if not t[1] and t[0] == passive(down(f)):
                t[0], t[1] = focused(f), True
                break
        else:
            raise ValueError(f"no passive {down(f)} to activate")
    tagged.sort(key=lambda t: t[0])
    xi = tuple(t[0] for t in tagged)
    return Derivation(
        "acut", Sequent(FOC, d.per, xi), (d, e),
        left=tuple(i for i, t in enumerate(tagged) if t[2]),
        cut_formula=p,
        activated=tuple(i for i, t in enumerate(tagged) if t[1]))
