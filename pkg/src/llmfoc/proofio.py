"""Reading and writing sequents and proofs as s-expressions (and JSON).

Proof files store only the root sequent; every premise sequent is rebuilt
from the conclusion and the rule data recorded at each node::

    (proof (foc (per) (ctx (natom a) (focus (atom a))))
      (ax))
"""

from __future__ import annotations

import json

from .kernel import (
    ARITY, FOC, INV, Derivation, Sequent, Item, format_path, ms, premise_sequents,
    passive, focused,
)
from .sexpr import SExprError, Symbol, read_one
from .syntax import Formula, FormulaSyntaxError, formula_from_sexpr, parse_formula, print_formula

INT_KEYS = ("principal", "left", "theta", "activated")
DATA_KEYS = ("principal", "left", "copies", "theta", "cutformula", "activated")


class ProofFormatError(ValueError):
    """Malformed proof or sequent text."""


class ReconstructionError(ValueError):
    """A rule instance in a proof file is too malformed to rebuild its premises."""

    def __init__(self, path, rule, clauses):
        self.path = path
        self.rule = rule
        self.clauses = list(clauses)
        super().__init__("; ".join(f"{format_path(path)}: {rule}: {c}" for c in self.clauses))


def _err(node, msg):
    line, col = getattr(node, "line", "?"), getattr(node, "column", "?")
    return ProofFormatError(f"{msg} (at {line}:{col})")


def _formula(node):
    try:
        return formula_from_sexpr(node)
    except FormulaSyntaxError as exc:
        raise ProofFormatError(str(exc)) from None
    except ValueError as exc:
        raise ProofFormatError(str(exc)) from None


def _tagged(node, tag):
    if not isinstance(node, list) or not node or node[0] != tag:
        raise _err(node, f"expected ({tag} ...)")
    return node[1:]


def sequent_from_sexpr(node) -> Sequent:
    if not isinstance(node, list) or len(node) != 3 or node[0] not in (INV, FOC):
        raise _err(node, "expected (inv (per ...) (ctx ...)) or (foc (per ...) (ctx ...))")
    kind = str(node[0])
    per = tuple(_formula(f) for f in _tagged(node[1], "per"))
    raw = _tagged(node[2], "ctx")
    if kind == INV:
        ctx = tuple(_formula(f) for f in raw)
    else:
        ctx = []
        for x in raw:
            if isinstance(x, list) and x and x[0] == "focus":
                if len(x) != 2:
                    raise _err(x, "malformed focus item")
                ctx.append(focused(_formula(x[1])))
            else:
                ctx.append(passive(_formula(x)))
    return Sequent(kind, ms(per), ms(ctx))


def parse_sequent(text: str) -> Sequent:
    try:
        return sequent_from_sexpr(read_one(text))
    except SExprError as exc:
        raise ProofFormatError(str(exc)) from None


def print_sequent(s: Sequent) -> str:
    per = " ".join(print_formula(f) for f in s.per)
    if s.kind == INV:
        ctx = " ".join(print_formula(f) for f in s.ctx)
    else:
        ctx = " ".join(_print_item(it) for it in s.ctx)
    return f"({s.kind} (per{' ' + per if per else ''}) (ctx{' ' + ctx if ctx else ''}))"


def _print_item(it: Item) -> str:
    f = print_formula(it.formula)
    return f"(focus {f})" if it.focus else f


def _data_fields(d: Derivation) -> list[tuple[str, object]]:
    out = []
    if d.principal is not None:
        out.append(("principal", (d.principal,)))
    if d.left is not None:
        out.append(("left", d.left))
    if d.rule == "decide":
        out.append(("copies", d.copies or ()))
        out.append(("theta", d.theta or ()))
    if d.cut_formula is not None:
        out.append(("cutformula", (d.cut_formula,)))
    if d.activated is not None:
        out.append(("activated", d.activated))
    return out


def _print_deriv(d: Derivation, indent: int) -> str:
    parts = [d.rule]
    for key, vals in _data_fields(d):
        body = " ".join(print_formula(v) if isinstance(v, Formula) else str(v) for v in vals)
        parts.append(f"({key}{' ' + body if body else ''})")
    head = "(" + " ".join(parts)
    pad = " " * (indent + 2)
    return head + "".join("\n" + pad + _print_deriv(p, indent + 2) for p in d.premises) + ")"


def print_proof(d: Derivation) -> str:
    return f"(proof {print_sequent(d.conclusion)}\n  {_print_deriv(d, 2)})\n"


def _deriv_from_sexpr(node, conclusion: Sequent, path=()) -> Derivation:
    if not isinstance(node, list) or not node or not isinstance(node[0], Symbol):
        raise _err(node, "expected a derivation (rule ...)")
    rule = str(node[0])
    if rule not in ARITY:
        raise _err(node[0], f"unknown rule {rule}")
    data = {}
    subs = []
    for x in node[1:]:
        if isinstance(x, list) and x and x[0] in DATA_KEYS:
            key = str(x[0])
            if key in INT_KEYS:
                try:
                    vals = tuple(int(v) for v in x[1:])
                except (TypeError, ValueError):
                    raise _err(x, f"{key} expects integers") from None
            else:
                vals = tuple(_formula(v) for v in x[1:])
            data[key] = vals
        else:
            subs.append(x)
    kwargs = {}
    if "principal" in data:
        if len(data["principal"]) != 1:
            raise _err(node, "principal takes exactly one index")
        kwargs["principal"] = data["principal"][0]
    if "cutformula" in data:
        if len(data["cutformula"]) != 1:
            raise _err(node, "cutformula takes exactly one formula")
        kwargs["cut_formula"] = data["cutformula"][0]
    for key in ("left", "theta", "activated"):
        if key in data:
            kwargs[key] = data[key]
    if "copies" in data:
        kwargs["copies"] = ms(data["copies"])
    if rule == "decide":
        kwargs.setdefault("copies", ())
        kwargs.setdefault("theta", ())
    shell = Derivation(rule, conclusion, **kwargs)
    prems, clauses = premise_sequents(shell, mode="experimental")
    if prems is None:
        raise ReconstructionError(path, rule, clauses)
    if len(subs) != len(prems):
        raise _err(node, f"{rule} expects {len(prems)} premise(s), got {len(subs)}")
    children = tuple(_deriv_from_sexpr(x, s, path + (i,))
                     for i, (x, s) in enumerate(zip(subs, prems)))
    return Derivation(rule, conclusion, children, **kwargs)


def proof_from_sexpr(node) -> Derivation:
    if not isinstance(node, list) or len(node) != 3 or node[0] != "proof":
        raise _err(node, "expected (proof SEQUENT DERIVATION)")
    return _deriv_from_sexpr(node[2], sequent_from_sexpr(node[1]))


def parse_proof(text: str) -> Derivation:
    try:
        node = read_one(text)
    except SExprError as exc:
        raise ProofFormatError(str(exc)) from None
    return proof_from_sexpr(node)


def load_proof(path) -> Derivation:
    with open(path, encoding="utf-8") as fh:
        return parse_proof(fh.read())


# -- JSON mirror ---------------------------------------------------------------

def sequent_to_json(s: Sequent) -> dict:
    if s.kind == INV:
        ctx = [print_formula(f) for f in s.ctx]
    else:
        ctx = [{"focus": it.focus, "formula": print_formula(it.formula)} for it in s.ctx]
    return {"kind": s.kind, "per": [print_formula(f) for f in s.per], "ctx": ctx}


def sequent_from_json(obj: dict) -> Sequent:
    per = tuple(parse_formula(f) for f in obj["per"])
    if obj["kind"] == INV:
        ctx = tuple(parse_formula(f) for f in obj["ctx"])
    else:
        ctx = tuple(Item(bool(it["focus"]), parse_formula(it["formula"])) for it in obj["ctx"])
    return Sequent(obj["kind"], ms(per), ms(ctx))


def _deriv_to_json(d: Derivation) -> dict:
    data = {}
    for key, vals in _data_fields(d):
        vals = [print_formula(v) if isinstance(v, Formula) else v for v in vals]
        data[key] = vals[0] if key in ("principal", "cutformula") else vals
    return {"rule": d.rule, "data": data,
            "premises": [_deriv_to_json(p) for p in d.premises]}


def proof_to_json(d: Derivation) -> dict:
    return {"sequent": sequent_to_json(d.conclusion), "deriv": _deriv_to_json(d)}


def proof_from_json(obj: dict | str) -> Derivation:
    if isinstance(obj, str):
        obj = json.loads(obj)
    return _deriv_from_json(obj["deriv"], sequent_from_json(obj["sequent"]))


def _deriv_from_json(obj, conclusion, path=()):
    data = obj.get("data", {})
    kwargs = {}
    if "principal" in data:
        kwargs["principal"] = int(data["principal"])
    if "cutformula" in data:
        kwargs["cut_formula"] = parse_formula(data["cutformula"])
    for key in ("left", "theta", "activated"):
        if key in data:
            kwargs[key] = tuple(int(i) for i in data[key])
    if obj["rule"] == "decide":
        kwargs["copies"] = ms(parse_formula(f) for f in data.get("copies", ()))
        kwargs.setdefault("theta", ())
    shell = Derivation(obj["rule"], conclusion, **kwargs)
    prems, clauses = premise_sequents(shell, mode="experimental")
    if prems is None:
        raise ReconstructionError(path, obj["rule"], clauses)
    subs = obj.get("premises", [])
    if len(subs) != len(prems):
        raise ProofFormatError(f"{obj['rule']} expects {len(prems)} premise(s)")
    children = tuple(_deriv_from_json(x, s, path + (i,))
                     for i, (x, s) in enumerate(zip(subs, prems)))
    return Derivation(obj["rule"], conclusion, children, **kwargs)
