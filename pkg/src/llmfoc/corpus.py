"""Hand-built reference derivations: the worked multifocusing example and
the bad-cut configuration built on top of it."""

from __future__ import annotations

from .kernel import (
    Derivation, mk_ax, mk_bot, mk_cut, mk_decide, mk_par, mk_release, mk_tensor,
)
from .syntax import BOT, atom, down, natom, par, tensor, up


def multifocus_proof() -> Derivation:
    """Both ``down (a (x) up b^)`` and ``down (c (x) up d^)`` decided in one phase."""
    a, b, c, d = atom("a"), atom("b"), atom("c"), atom("d")
    nb, nd = natom("b"), natom("d")
    upper = mk_decide(mk_tensor(mk_ax((), "b"), mk_ax((), "d"), b, d))
    rel = mk_release(upper, [nb, nd])
    inner = mk_tensor(mk_ax((), "c"), rel, c, up(nd))
    outer = mk_tensor(mk_ax((), "a"), inner, a, up(nb))
    return mk_decide(outer)


def identity_variation() -> Derivation:
    """Proof of |= . : down(a (x) up b^), [up bot], [up (a^ par down b)]."""
    a, b = atom("a"), atom("b")
    na, nb = natom("a"), natom("b")
    inner = mk_decide(mk_ax((), "b"))                       # |- b^, down b
    rel = mk_release(inner, [nb])                           # |= down b, [up b^]
    t = mk_tensor(mk_ax((), "a"), rel, a, up(nb))           # |= a^, down b, [a (x) up b^]
    dec = mk_decide(t)                                      # |- a^, down b, down(a (x) up b^)
    p = mk_par(dec, na, down(b))
    bt = mk_bot(p)
    return mk_release(bt, [BOT, par(na, down(b))])


def bad_cut() -> Derivation:
    """The identity variation cut against :func:`multifocus_proof` on ``up (a^ par down b)``."""
    cut_formula = up(par(natom("a"), down(atom("b"))))
    return mk_cut(identity_variation(), multifocus_proof(), cut_formula)
