"""Random generation of formulas, contexts, valid proofs and cut instances.

Proofs are synthesized bottom-up from the smart constructors, so they are
valid by construction (the test suite still re-checks them).  Everything is
driven by an explicit :class:`random.Random` for reproducibility.
"""

from __future__ import annotations

import random
from collections import Counter

from .kernel import (
    Derivation, Foc, Inv, focused, mk_ax, mk_bang, mk_bot, mk_cut, mk_cut_bang, mk_decide,
    mk_fcut, mk_fcut_bang, mk_one, mk_par, mk_plus, mk_quest, mk_release, mk_tensor,
    mk_top, mk_with, passive, weaken,
)
from .search import SearchBudget, prove
from .syntax import (
    BOT, ONE, TOP, ZERO, Formula, atom, bang, down, dual, natom, par, plus, quest,
    tensor, up, with_,
)

ATOMS = ("a", "b", "c", "d")


def random_formula(rng: random.Random, positive: bool, depth: int = 3, atoms=ATOMS) -> Formula:
    if depth <= 0 or rng.random() < 0.3:
        if positive:
            return rng.choice([atom(rng.choice(atoms))] * 4 + [ONE, ZERO])
        return rng.choice([natom(rng.choice(atoms))] * 4 + [BOT, TOP])
    k = rng.randrange(4)
    sub = lambda pol: random_formula(rng, pol, depth - 1, atoms)
    if positive:
        if k == 0:
            return tensor(sub(True), sub(True))
        if k == 1:
            return plus(sub(True), sub(True))
        if k == 2:
            return up(sub(False))
        return bang(sub(False)) if rng.random() < 0.5 else up(sub(False))
    if k == 0:
        return par(sub(False), sub(False))
    if k == 1:
        return with_(sub(False), sub(False))
    if k == 2:
        return down(sub(True))
    return quest(sub(True)) if rng.random() < 0.5 else down(sub(True))


def random_focctx(rng: random.Random, size: int = 6, atoms=ATOMS) -> tuple:
    items = []
    for _ in range(rng.randrange(size + 1)):
        r = rng.random()
        if r < 0.35:
            items.append(passive(down(random_formula(rng, True, 2, atoms))))
        elif r < 0.7:
            items.append(passive(random_formula(rng, False, 2, atoms)))
        else:
            items.append(focused(random_formula(rng, True, 2, atoms)))
    return Foc((), items).ctx


def _per_union(*ds):
    need = Counter()
    for d in ds:
        need |= Counter(d.per)
    out = []
    for d in ds:
        extra = need - Counter(d.per)
        out.append(weaken(d, list(extra.elements())))
    return out


class Synth:
    """Bottom-up synthesizer of valid cut-free proofs."""

    def __init__(self, rng: random.Random, atoms=ATOMS, multifocus: float = 0.5):
        self.rng = rng
        self.atoms = atoms
        self.multifocus = multifocus

    def neg(self, depth=2):
        return random_formula(self.rng, False, depth, self.atoms)

    def pos(self, depth=2):
        return random_formula(self.rng, True, depth, self.atoms)

    def foc(self, size: int) -> Derivation:
        rng = self.rng
        if size <= 1:
            return mk_ax((), rng.choice(self.atoms)) if rng.random() < 0.8 else mk_one()
        k = rng.random()
        if k < 0.3:
            s1 = rng.randrange(1, size)
            d1, d2 = _per_union(self.foc(s1), self.foc(size - s1))
            q = rng.choice([it.formula for it in d1.ctx if it.focus])
            r = rng.choice([it.formula for it in d2.ctx if it.focus])
            return mk_tensor(d1, d2, q, r)
        if k < 0.45:
            d = self.foc(size - 1)
            q = rng.choice([it.formula for it in d.ctx if it.focus])
            other = self.pos(1)
            return mk_plus(d, q, other, True) if rng.random() < 0.5 else mk_plus(d, other, q, False)
        if k < 0.5:
            d = self.inv(size - 1)
            if len(d.ctx) == 1:
                return mk_bang(d)
        d = self.inv(size - 1)
        if not d.ctx:
            d = mk_bot(d)
        ctx = list(d.ctx)
        rng.shuffle(ctx)
        n = 1 if rng.random() > self.multifocus else rng.randint(1, len(ctx))
        return mk_release(d, ctx[:n])

    def inv(self, size: int) -> Derivation:
        rng = self.rng
        if size <= 1:
            extra = [self.neg(1) for _ in range(rng.randrange(3))]
            return mk_top((), [TOP] + extra)
        k = rng.random()
        if k < 0.4:
            d = self.foc(size - 1)
            fs = [it.formula for it in d.ctx if it.focus]
            copies = [f for f in fs if rng.random() < 0.2]
            if copies:
                d = weaken(d, copies)
            return mk_decide(d, copies)
        d = self.inv(size - 1)
        if k < 0.55 and len(d.ctx) >= 2:
            n, m = rng.sample(list(d.ctx), 2)
            return mk_par(d, n, m)
        if k < 0.65 or not d.ctx:
            return mk_bot(d)
        if k < 0.75:
            n = rng.choice(d.ctx)
            return mk_with(d, d, n, n)
        if k < 0.9:
            if d.per and rng.random() < 0.6:
                p = rng.choice(d.per)
                return mk_quest(d, p)
            p = self.pos(1)
            return mk_quest(weaken(d, [p]), p)
        n, m = rng.sample(list(d.ctx), 2) if len(d.ctx) >= 2 else (None, None)
        return mk_par(d, n, m) if n is not None else mk_bot(d)


# -- cut instances -------------------------------------------------------------------

def eta(p: Formula, depth: int | None = None) -> Derivation | None:
    """A cut-free proof of ``|- P^, down P`` found by search."""
    depth = depth if depth is not None else 3 * p._size + 4
    return prove(Inv((), (dual(p), down(p))), SearchBudget(depth=depth, copy_cap=1))


def _wrap_inv(rng, synth, e: Derivation, steps: int, keep: Formula | None = None) -> Derivation:
    """Add random inversion rules below ``e`` without touching ``keep``."""
    for _ in range(steps):
        free = list(e.ctx) if keep is None else _minus(e.ctx, keep)
        k = rng.randrange(4)
        if k == 0:
            e = mk_bot(e)
        elif k == 1:
            p = synth.pos(1)
            e = mk_quest(weaken(e, [p]), p)
        elif k == 2 and free:
            f = rng.choice(free)
            e = mk_with(e, mk_top(e.per, _minus(e.ctx, f) + [TOP]), f, TOP)
        elif len(free) >= 2:
            n, m = rng.sample(free, 2)
            e = mk_par(e, n, m)
    return e


def _minus(ctx, f):
    out = list(ctx)
    out.remove(f)
    return out


def _wrap_foc(rng, synth, e: Derivation, steps: int) -> Derivation:
    for _ in range(steps):
        q = rng.choice([it.formula for it in e.ctx if it.focus])
        if rng.random() < 0.5:
            other = synth.foc(rng.randint(1, 3))
            e, other = _per_union(e, other)
            r = rng.choice([it.formula for it in other.ctx if it.focus])
            e = mk_tensor(e, other, q, r) if rng.random() < 0.5 else mk_tensor(other, e, r, q)
        else:
            o = synth.pos(1)
            e = mk_plus(e, q, o, True) if rng.random() < 0.5 else mk_plus(e, o, q, False)
    return e


MAX_CUT_FORMULA = 6


def _linear_pair(rng, synth, size):
    d = synth.foc(size)
    small = [it.formula for it in d.ctx if it.focus and it.formula._size <= MAX_CUT_FORMULA]
    if not small:
        return d, None, None
    p = rng.choice(small)
    return d, p, eta(p)


def cut_instance(rng: random.Random, kind: str, size: int = 5, synth: Synth | None = None):
    """A valid derivation rooted at a cut of the given kind, or ``None``."""
    synth = synth or Synth(rng)
    if kind in ("cut", "fcut"):
        d, p, e = _linear_pair(rng, synth, size)
        if e is None:
            return None
        if kind == "cut":
            e = _wrap_inv(rng, synth, e, rng.randrange(3), keep=dual(p))
            d, e = _per_union(d, e)
            return mk_cut(d, e, p)
        e = mk_release(e, [down(p)])
        e = _wrap_foc(rng, synth, e, rng.randrange(3))
        d, e = _per_union(d, e)
        return mk_fcut(d, e, p)
    # persistent cuts: the cut formula must have a closed proof of its dual
    p, dproof = _persistent_formula(rng, synth)
    if dproof is None:
        return None
    body = _copying_body(rng, synth, p, size)
    if kind == "cutBang":
        e = _wrap_inv(rng, synth, body, rng.randrange(2))
    else:
        if not body.ctx:
            body = mk_bot(body)
        e = _wrap_foc(rng, synth, mk_release(body, rng.sample(list(body.ctx), 1)), rng.randrange(2))
    extra = Counter(e.per) - Counter([p])
    dproof = weaken(dproof, list((extra - Counter(dproof.per)).elements()))
    e = weaken(e, list((Counter(dproof.per) + Counter([p]) - Counter(e.per)).elements()))
    return (mk_cut_bang if kind == "cutBang" else mk_fcut_bang)(dproof, e, p)


_PERSISTENT = [
    up(BOT),
    tensor(atom("a"), up(natom("a"))),
    tensor(atom("b"), up(natom("b"))),
    plus(up(BOT), up(BOT)),
    up(par(BOT, BOT)),
]


def _persistent_formula(rng, synth):
    p = rng.choice(_PERSISTENT)
    return p, prove(Inv((), (dual(p),)), SearchBudget(depth=8, copy_cap=1))


def _copying_body(rng, synth, p: Formula, size: int) -> Derivation:
    """An inversion proof with ``p`` in its persistent context, usually
    deciding on one or more copies of ``p``."""
    base = synth.inv(size)
    if rng.random() < 0.2:
        return weaken(base, [p])
    if p == up(BOT):
        k = rng.randint(1, 2)
        x = base
        for _ in range(k):
            x = mk_bot(x)
        rest = _minus(x.ctx, BOT)
        if k == 2:
            rest = _minus(rest, BOT)
        extra = rng.sample(rest, rng.randrange(len(rest) + 1))
        foc = weaken(mk_release(x, [BOT] * k + extra), [p])
        return mk_decide(foc, [p] * k)
    probe = prove(Foc((), (passive(dual(p)), focused(p))), SearchBudget(depth=10, copy_cap=1))
    if probe is None:
        return weaken(base, [p])
    return _wrap_inv(rng, synth, mk_decide(weaken(probe, [p]), [p]), rng.randrange(3))
