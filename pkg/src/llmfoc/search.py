"""Bounded exhaustive proof search.

Rules are read bottom-up in a fixed order, so both the first proof found and
the enumeration order are reproducible.  Results are memoised per sequent and
remaining height.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass

from .kernel import (
    FOC, INV, Derivation, Foc, Inv, Sequent, _well_formed, focused, foci, is_spent,
    mk_ax, mk_bang, mk_bot, mk_decide, mk_one, mk_par, mk_plus, mk_quest, mk_release,
    mk_tensor, mk_top, mk_with, ms, ms_remove, passive, passives,
)
from .syntax import natom


@dataclass(frozen=True)
class SearchBudget:
    depth: int
    limit: int = 10_000
    copy_cap: int = 2

    def __post_init__(self):
        if self.depth < 0 or self.limit < 1 or self.copy_cap < 0:
            raise ValueError("search budget fields must be non-negative (limit positive)")


def _sub_multisets(items: tuple):
    """Distinct sub-multisets of a sorted tuple, smallest first."""
    groups = [(x, n) for x, n in Counter(items).items()]
    groups.sort(key=lambda g: g[0])
    for counts in itertools.product(*[range(n + 1) for _, n in groups]):
        yield tuple(x for (x, _), k in zip(groups, counts) for _ in range(k))


def _distinct(xs):
    seen = []
    for x in xs:
        if x not in seen:
            seen.append(x)
    return seen


class Searcher:
    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self._first = {}
        self._all = {}

    # -- candidate rule instances for a sequent, in fixed order --------------

    def candidates(self, s: Sequent):
        """Yield ``(premise_sequents, build)`` pairs."""
        if s.kind == INV:
            yield from self._inv_candidates(s)
        else:
            yield from self._foc_candidates(s)

    def _inv_candidates(self, s):
        per, ctx = s.per, s.ctx
        for f in _distinct(ctx):
            rest = ms_remove(ctx, f)
            op = f.op
            if op == "top":
                yield (), (lambda _p, per=per, ctx=ctx: mk_top(per, ctx))
            elif op == "bot":
                yield (Inv(per, rest),), (lambda p: mk_bot(p[0]))
            elif op == "par":
                n, m = f.args
                yield (Inv(per, rest + (n, m)),), (lambda p, n=n, m=m: mk_par(p[0], n, m))
            elif op == "with":
                n, m = f.args
                yield ((Inv(per, rest + (n,)), Inv(per, rest + (m,))),
                       lambda p, n=n, m=m: mk_with(p[0], p[1], n, m))
            elif op == "quest":
                q = f.args[0]
                yield (Inv(per + (q,), rest),), (lambda p, q=q: mk_quest(p[0], q))
        downs = tuple(f for f in ctx if f.op == "down")
        others = tuple(f for f in ctx if f.op != "down")
        pool = _distinct(per)
        cap = self.budget.copy_cap
        for theta in _sub_multisets(downs):
            unchosen = list(downs)
            for f in theta:
                unchosen.remove(f)
            for counts in itertools.product(range(cap + 1), repeat=len(pool)):
                copies = tuple(c for c, k in zip(pool, counts) for _ in range(k))
                if not theta and not copies:
                    continue
                items = ([passive(f) for f in others + tuple(unchosen)]
                         + [focused(f.args[0]) for f in theta] + [focused(c) for c in copies])
                yield (Foc(per, items),), (lambda p, copies=copies: mk_decide(p[0], copies))

    def _foc_candidates(self, s):
        per, ctx = s.per, s.ctx
        if is_spent(ctx):
            if not foci(ctx):
                return
            delta = tuple(f.args[0] for f in foci(ctx))
            yield ((Inv(per, passives(ctx) + delta),),
                   lambda p, delta=delta: mk_release(p[0], delta))
            return
        for item in _distinct(it for it in ctx if it.focus and it.formula.op != "up"):
            f = item.formula
            rest = ms_remove(ctx, item)
            op = f.op
            if op == "atom":
                if rest == (passive(natom(f.name)),):
                    yield (), (lambda _p, name=f.name: mk_ax(per, name))
            elif op == "one":
                if not rest:
                    yield (), (lambda _p: mk_one(per))
            elif op == "bang":
                if not rest:
                    yield (Inv(per, (f.args[0],)),), (lambda p: mk_bang(p[0]))
            elif op == "plus":
                q, r = f.args
                yield (Foc(per, rest + (focused(q),)),), (lambda p, q=q, r=r: mk_plus(p[0], q, r, True))
                yield (Foc(per, rest + (focused(r),)),), (lambda p, q=q, r=r: mk_plus(p[0], q, r, False))
            elif op == "tensor":
                q, r = f.args
                for left in _sub_multisets(rest):
                    right = list(rest)
                    for x in left:
                        right.remove(x)
                    yield ((Foc(per, left + (focused(q),)), Foc(per, tuple(right) + (focused(r),))),
                           lambda p, q=q, r=r: mk_tensor(p[0], p[1], q, r))

    # -- search ---------------------------------------------------------------

    def first(self, s: Sequent, depth: int):
        """``(derivation or None, hit_cutoff)``."""
        key = (s, depth)
        if key in self._first:
            return self._first[key]
        if depth <= 0:
            res = (None, next(iter(self.candidates(s)), None) is not None)
            self._first[key] = res
            return res
        cutoff = False
        res = None
        for prems, build in self.candidates(s):
            subs = []
            for ps in prems:
                d, c = self.first(ps, depth - 1)
                cutoff |= c
                if d is None:
                    break
                subs.append(d)
            else:
                res = (build(subs), False)
                break
        if res is None:
            res = (None, cutoff)
        self._first[key] = res
        return res

    def all(self, s: Sequent, depth: int):
        """``(derivations, hit_cutoff)``; at most ``limit`` derivations."""
        key = (s, depth)
        if key in self._all:
            return self._all[key]
        limit = self.budget.limit
        if depth <= 0:
            res = ([], next(iter(self.candidates(s)), None) is not None)
            self._all[key] = res
            return res
        out = []
        cutoff = False
        for prems, build in self.candidates(s):
            lists = []
            for ps in prems:
                ds, c = self.all(ps, depth - 1)
                cutoff |= c
                lists.append(ds)
            for combo in itertools.product(*lists):
                if len(out) >= limit:
                    cutoff = True
                    break
                out.append(build(combo))
            if len(out) >= limit and cutoff:
                break
        res = (out, cutoff)
        self._all[key] = res
        return res


def _validate(s: Sequent):
    problems = _well_formed(s)
    if problems:
        raise ValueError(f"ill-formed sequent: {problems[0]}")


def prove_with_status(s: Sequent, budget: SearchBudget):
    """First proof within the budget, and whether the height bound was reached."""
    _validate(s)
    return Searcher(budget).first(s, budget.depth)


def prove(s: Sequent, budget: SearchBudget) -> Derivation | None:
    return prove_with_status(s, budget)[0]


def enumerate_with_status(s: Sequent, budget: SearchBudget):
    _validate(s)
    return Searcher(budget).all(s, budget.depth)


def enumerate_proofs(s: Sequent, budget: SearchBudget) -> list[Derivation]:
    """All derivations of height at most ``budget.depth``, up to ``budget.limit``."""
    return enumerate_with_status(s, budget)[0]
