"""Erasure to an unfocused dyadic calculus, phase extraction and maximality.

The dyadic target is one-sided with a persistent zone ``Per``; its rules are
``ax 1 tensor bot par top with plus1 plus2 bang quest copy``.  ``copy`` moves a
member of ``Per`` into the linear zone.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .kernel import (
    CUT_RULES, FOC, INV, Derivation, Foc, check, focused, format_path, iter_nodes,
    mk_decide, ms_remove, passive,
)
from .search import SearchBudget, prove_with_status
from .syntax import Formula

UL_OPS = ("atom", "natom", "one", "bot", "zero", "top",
          "tensor", "par", "plus", "with", "bang", "quest")
_UL_DUAL = {"atom": "natom", "natom": "atom", "one": "bot", "bot": "one",
            "zero": "top", "top": "zero", "tensor": "par", "par": "tensor",
            "plus": "with", "with": "plus", "bang": "quest", "quest": "bang"}
_INFIX = {"tensor": "⊗", "par": "⅋", "plus": "⊕", "with": "&"}
_CONST = {"one": "1", "bot": "⊥", "zero": "0", "top": "⊤"}


class AnalysisError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class ULFormula:
    """Unpolarized, shift-free linear-logic formula."""

    op: str
    args: tuple = ()
    name: str = ""

    def __post_init__(self):
        if self.op not in UL_OPS:
            raise ValueError(f"not an unpolarized connective: {self.op}")

    def __str__(self):
        if self.op in ("atom", "natom"):
            return f"({self.op} {self.name})"
        if not self.args:
            return self.op
        return "(" + self.op + " " + " ".join(map(str, self.args)) + ")"

    def pretty(self) -> str:
        if self.op == "atom":
            return self.name
        if self.op == "natom":
            return self.name + "^⊥"
        if self.op in _CONST:
            return _CONST[self.op]
        if self.op in ("bang", "quest"):
            a = self.args[0]
            inner = a.pretty() if not a.args else f"({a.pretty()})"
            return ("!" if self.op == "bang" else "?") + inner
        parts = [a.pretty() if len(a.args) < 2 else f"({a.pretty()})" for a in self.args]
        return f" {_INFIX[self.op]} ".join(parts)


def ul_size(f: ULFormula) -> int:
    return 1 + sum(ul_size(a) for a in f.args)


def ul_dual(f: ULFormula) -> ULFormula:
    return ULFormula(_UL_DUAL[f.op], tuple(ul_dual(a) for a in f.args), f.name)


def erase_formula(f: Formula) -> ULFormula:
    """Remove every shift; all other connectives are kept."""
    while f.op in ("up", "down"):
        f = f.args[0]
    return ULFormula(f.op, tuple(erase_formula(a) for a in f.args), f.name or "")


def _ums(xs) -> tuple:
    return tuple(sorted(xs))


@dataclass(frozen=True)
class USequent:
    per: tuple
    ctx: tuple

    def __str__(self):
        per = ", ".join(f.pretty() for f in self.per) or "."
        ctx = ", ".join(f.pretty() for f in self.ctx) or "."
        return f"⊢ {per} : {ctx}"


@dataclass(frozen=True)
class UDeriv:
    rule: str
    conclusion: USequent
    premises: tuple = ()
    principal: ULFormula | None = None


U_ARITY = {"ax": 0, "one": 0, "top": 0, "tensor": 2, "with": 2, "bot": 1, "par": 1,
           "plus1": 1, "plus2": 1, "bang": 1, "quest": 1, "copy": 1}


def _minus(ctx, xs):
    c = Counter(ctx)
    for x in xs:
        if c[x] <= 0:
            return None
        c[x] -= 1
    return _ums(c.elements())


def _check_unode(u: UDeriv) -> list[str]:
    rule, s, ps = u.rule, u.conclusion, u.premises
    if rule not in U_ARITY:
        return ["unknown rule"]
    if len(ps) != U_ARITY[rule]:
        return [f"expected {U_ARITY[rule]} premise(s)"]
    f = u.principal
    per, ctx = s.per, s.ctx
    if any(p.conclusion.per != per for p in ps) and rule != "quest":
        return ["persistent zone must be shared with premises"]
    if rule == "ax":
        ok = (len(ctx) == 2 and {ctx[0].op, ctx[1].op} == {"atom", "natom"}
              and ctx[0].name == ctx[1].name)
        return [] if ok else ["conclusion must be a, a^⊥"]
    if rule == "one":
        return [] if ctx == (ULFormula("one"),) else ["conclusion must be exactly 1"]
    if rule == "copy":
        if f is None or f not in per:
            return ["copied formula must be in Per"]
        return [] if _ums(ctx + (f,)) == ps[0].conclusion.ctx else ["premise mismatch"]
    if f is None or f not in ctx:
        return ["principal formula missing from conclusion"]
    want_op = {"top": "top", "tensor": "tensor", "with": "with", "bot": "bot", "par": "par",
               "plus1": "plus", "plus2": "plus", "bang": "bang", "quest": "quest"}[rule]
    if f.op != want_op:
        return [f"principal must be a {want_op}"]
    rest = _minus(ctx, [f])
    if rule == "top":
        return []
    if rule == "bot":
        return [] if ps[0].conclusion.ctx == rest else ["premise mismatch"]
    if rule == "par":
        return [] if ps[0].conclusion.ctx == _ums(rest + f.args) else ["premise mismatch"]
    if rule in ("plus1", "plus2"):
        sub = f.args[0 if rule == "plus1" else 1]
        return [] if ps[0].conclusion.ctx == _ums(rest + (sub,)) else ["premise mismatch"]
    if rule == "with":
        ok = all(ps[i].conclusion.ctx == _ums(rest + (f.args[i],)) for i in (0, 1))
        return [] if ok else ["premise mismatch"]
    if rule == "tensor":
        left = _minus(ps[0].conclusion.ctx, [f.args[0]])
        right = _minus(ps[1].conclusion.ctx, [f.args[1]])
        if left is None or right is None or _ums(left + right) != rest:
            return ["premise contexts must split the conclusion"]
        return []
    if rule == "bang":
        if rest:
            return ["conclusion must be exactly !A"]
        return [] if ps[0].conclusion.ctx == (f.args[0],) else ["premise mismatch"]
    # quest
    prem = ps[0].conclusion
    if prem.per != _ums(per + (f.args[0],)) or prem.ctx != rest:
        return ["premise mismatch"]
    return []


def check_dyadic(u: UDeriv) -> list[str]:
    """Violations as ``path: rule: clause`` strings; empty means valid."""
    out = []
    stack = [((), u)]
    while stack:
        path, node = stack.pop()
        for clause in _check_unode(node):
            out.append(f"{format_path(path)}: {node.rule}: {clause}")
        for i, p in enumerate(node.premises):
            stack.append((path + (i,), p))
    return out


def udsize(u: UDeriv) -> int:
    return 1 + sum(udsize(p) for p in u.premises)


def erase_sequent(s) -> USequent:
    per = _ums(erase_formula(f) for f in s.per)
    if s.kind == INV:
        ctx = _ums(erase_formula(f) for f in s.ctx)
    else:
        ctx = _ums(erase_formula(it.formula) for it in s.ctx)
    return USequent(per, ctx)


def _principal(d: Derivation):
    f = d.ctx[d.principal]
    return erase_formula(f.formula if d.conclusion.kind == FOC else f)


def _erase(d: Derivation) -> UDeriv:
    rule = d.rule
    s = erase_sequent(d.conclusion)
    prems = tuple(_erase(p) for p in d.premises)
    if rule in ("release",):
        return prems[0]
    if rule == "decide":
        u = prems[0]
        for c in d.copies or ():
            cu = erase_formula(c)
            u = UDeriv("copy", USequent(u.conclusion.per, _minus(u.conclusion.ctx, [cu])), (u,), cu)
        return u
    if rule == "ax":
        return UDeriv("ax", s)
    if rule == "one":
        return UDeriv("one", s)
    if rule == "bang":
        return UDeriv("bang", s, prems, erase_formula(d.ctx[0].formula))
    if rule in ("plusL", "plusR"):
        return UDeriv("plus1" if rule == "plusL" else "plus2", s, prems, _principal(d))
    if rule in ("tensor", "top", "bot", "par", "with", "quest"):
        return UDeriv(rule, s, prems, _principal(d))
    raise AnalysisError(f"cannot erase rule {rule}")


def erase_derivation(d: Derivation) -> UDeriv:
    """Map a cut-free focused proof to a dyadic proof of the erased sequent."""
    if any(n.rule in CUT_RULES for _, n in iter_nodes(d)):
        raise AnalysisError("erasure requires a cut-free derivation")
    report = check(d)
    if not report.ok:
        raise AnalysisError(f"input does not check: {report.violations[0]}")
    return _erase(d)


# -- phases ---------------------------------------------------------------------

@dataclass(frozen=True)
class Phase:
    """Focused segment opened by the decide at ``path`` (``None`` for a
    focused root that no decide opens)."""

    path: tuple | None
    foci: tuple
    nodes: tuple
    releases: tuple

    @property
    def width(self) -> int:
        return len(self.foci)

    def describe(self) -> str:
        where = "root" if self.path is None else f"decide@{format_path(self.path)}"
        fs = ", ".join(map(str, self.foci))
        return f"{where}: {self.width} foci [{fs}] nodes={len(self.nodes)} releases={len(self.releases)}"


def _segment(d: Derivation, path: tuple):
    nodes, releases = [], []
    stack = [(path, d)]
    while stack:
        p, n = stack.pop()
        nodes.append(p)
        if n.rule == "release":
            releases.append(p)
        if n.rule in ("release", "bang"):
            continue
        for i in range(len(n.premises) - 1, -1, -1):
            stack.append((p + (i,), n.premises[i]))
    return tuple(nodes), tuple(releases)


def _validated(d: Derivation):
    report = check(d)
    if not report.ok:
        raise AnalysisError(f"input does not check: {report.violations[0]}")


def phases(d: Derivation) -> list[Phase]:
    """One phase per decide node, in pre-order."""
    _validated(d)
    out = []
    for path, n in iter_nodes(d):
        if n.rule == "decide":
            prem = n.premises[0]
            nodes, rel = _segment(prem, path + (0,))
            out.append(Phase(path, tuple(sorted(f for f in (it.formula for it in prem.ctx if it.focus))),
                             nodes, rel))
    return out


def root_segment(d: Derivation) -> Phase | None:
    """The focused segment at the root, when the endsequent is focused."""
    if d.conclusion.kind != FOC or d.rule in CUT_RULES:
        return None
    nodes, rel = _segment(d, ())
    return Phase(None, tuple(it.formula for it in d.ctx if it.focus), nodes, rel)


# -- maximality ----------------------------------------------------------------------

MAXIMAL, EXTENDABLE, EXHAUSTED = "maximal", "extendable", "depth-exhausted"


@dataclass(frozen=True)
class Verdict:
    path: tuple
    status: str
    formula: Formula | None = None
    witness: Derivation | None = None

    def line(self) -> str:
        tag = f"extendable({self.formula})" if self.status == EXTENDABLE else self.status
        return f"decide@{format_path(self.path)}: {tag}"


@dataclass
class MaximalityReport:
    verdicts: list = field(default_factory=list)
    depth: int = 0

    @property
    def all_maximal(self) -> bool:
        return all(v.status == MAXIMAL for v in self.verdicts)

    def extendable(self) -> list:
        return [v for v in self.verdicts if v.status == EXTENDABLE]

    def lines(self) -> list[str]:
        return [v.line() for v in self.verdicts]


def _probes(node: Derivation):
    """Extra-focus candidates: an unselected ``down`` passive or one more copy."""
    prem = node.premises[0]
    seen = []
    for it in prem.ctx:
        if not it.focus and it.formula.op == "down" and it.formula not in seen:
            seen.append(it.formula)
            x = it.formula.args[0]
            ctx = ms_remove(prem.ctx, passive(it.formula)) + (focused(x),)
            yield x, Foc(prem.per, ctx), tuple(node.copies or ())
    for c in dict.fromkeys(prem.per):
        yield c, Foc(prem.per, prem.ctx + (focused(c),)), tuple(node.copies or ()) + (c,)


def check_maximal(d: Derivation, depth: int, copy_cap: int = 2) -> MaximalityReport:
    """Probe every decide node for one more focus that still completes within
    ``depth``; the conclusion below the node is kept."""
    if any(n.rule in CUT_RULES for _, n in iter_nodes(d)):
        raise AnalysisError("maximality analysis requires a cut-free derivation")
    _validated(d)
    budget = SearchBudget(depth=depth, copy_cap=copy_cap)
    report = MaximalityReport(depth=depth)
    for path, n in iter_nodes(d):
        if n.rule != "decide":
            continue
        hit = False
        verdict = None
        for f, seq, copies in _probes(n):
            proof, cut = prove_with_status(seq, budget)
            if proof is not None:
                verdict = Verdict(path, EXTENDABLE, f, mk_decide(proof, copies))
                break
            hit |= cut
        if verdict is None:
            verdict = Verdict(path, EXHAUSTED if hit else MAXIMAL)
        report.verdicts.append(verdict)
    return report



def print_uderiv(u: UDeriv, indent: int = 0) -> str:
    s = u.conclusion
    per = " ".join(map(str, s.per))
    ctx = " ".join(map(str, s.ctx))
    head = f"({u.rule}"
    if u.principal is not None:
        head += f" (principal {u.principal})"
    head += f" (seq (per{' ' + per if per else ''}) (ctx{' ' + ctx if ctx else ''}))"
    pad = " " * (indent + 2)
    return head + "".join("\n" + pad + print_uderiv(p, indent + 2) for p in u.premises) + ")"


def uderiv_to_json(u: UDeriv) -> dict:
    out = {"rule": u.rule,
           "per": [str(f) for f in u.conclusion.per],
           "ctx": [str(f) for f in u.conclusion.ctx],
           "premises": [uderiv_to_json(p) for p in u.premises]}
    if u.principal is not None:
        out["principal"] = str(u.principal)
    return out
