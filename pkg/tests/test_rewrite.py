import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from llmfoc import rewrite
from llmfoc.gen import Synth, cut_instance
from llmfoc.kernel import (
    FOC, INV, Foc, Inv, NotSpentError, check, dsize, focused, is_cut_free, is_spent, iter_nodes,
    mk_acut, mk_ax, mk_bot, mk_cut, mk_cut_bang, mk_decide, mk_fcut, mk_one, mk_par,
    mk_release, mk_tensor, mk_top, passive, skeleton, subtree, weaken,
)
from llmfoc.rewrite import (
    CutMeasure, IllFormedCut, InvalidInput, TerminationError, decompose, lower_deriv,
    normalize, reduce_step,
)
from llmfoc.search import SearchBudget, Searcher, enumerate_proofs, prove
from llmfoc.syntax import BOT, ONE, TOP, atom, down, natom, par, tensor, up
from strategies import proofs, spent_plug

a, b, c, d = (atom(x) for x in "abcd")
na, nb, nc, nd = (natom(x) for x in "abcd")


def focus_indices(deriv):
    return [i for i, it in enumerate(deriv.ctx) if it.focus]


# -- decomposition ---------------------------------------------------------------

def test_decompose_spent_base_case():
    t = mk_tensor(mk_ax((), "a"), mk_ax((), "b"), a, b)
    res = decompose(t, focus_indices(t)[0])
    assert res.core == t
    assert Counter(res.sigma) == Counter([passive(na), passive(nb)])
    assert res.suffix.steps == ()


def test_decompose_inside_multifocus_phase(mfp):
    upper = subtree(mfp, (0,))
    idx = upper.ctx.index(focused(tensor(c, up(nd))))
    res = decompose(upper, idx)
    assert Counter(res.sigma) == Counter([passive(nc), focused(up(nb)), passive(down(tensor(b, d)))])
    assert res.core.conclusion == Foc((), list(res.sigma) + [focused(tensor(c, up(nd)))])
    assert check(res.core).ok
    assert len(res.suffix.steps) == 1
    step = res.suffix.steps[0]
    assert step.sibling == mk_ax((), "a")
    assert dsize(res.core) + res.suffix.size == dsize(upper)
    assert res.suffix.replay(res.core) == upper


def test_decompose_other_focus(mfp):
    upper = subtree(mfp, (0,))
    idx = upper.ctx.index(focused(tensor(a, up(nb))))
    res = decompose(upper, idx)
    assert is_spent(res.sigma)
    assert dsize(res.core) + res.suffix.size == dsize(upper)


def test_decompose_rejects_passive_index(mfp):
    upper = subtree(mfp, (0,))
    passive_idx = next(i for i, it in enumerate(upper.ctx) if not it.focus)
    with pytest.raises(InvalidInput):
        decompose(upper, passive_idx)


def test_decompose_rejects_inversion_sequent(mfp):
    with pytest.raises(InvalidInput):
        decompose(mfp, 0)


def test_replay_with_extra_context(mfp):
    upper = subtree(mfp, (0,))
    res = decompose(upper, upper.ctx.index(focused(tensor(c, up(nd)))))
    for delta in ([], [up(BOT)], [up(BOT), up(na)]):
        plug = spent_plug(upper.per, res.sigma, delta)
        out = res.suffix.replay(plug)
        assert check(out).ok
        want = _without_item(upper.ctx, focused(tensor(c, up(nd))))
        assert Counter(out.ctx) == Counter(want + [focused(up(TOP))] + [focused(f) for f in delta])


def _without_item(ctx, item):
    out = list(ctx)
    out.remove(item)
    return out


# -- lowering ---------------------------------------------------------------------------

def test_lower_without_spent_foci_is_identity():
    t = mk_tensor(mk_ax((), "a"), mk_ax((), "b"), a, b)
    assert lower_deriv(t) == t


def test_lower_inner_release(mfp):
    rel = subtree(mfp, (0, 1, 1))
    out = lower_deriv(rel, rel.ctx.index(focused(up(nd))))
    assert out.conclusion == Foc((), [passive(nb), passive(down(tensor(b, d))), focused(up(nd))])
    assert skeleton(out) == skeleton(rel)
    assert out.premises == rel.premises
    assert check(out).ok


def test_lower_not_spent():
    multi = mk_release(mk_top((), [TOP, nb]), [TOP, nb])
    x = mk_tensor(mk_ax((), "a"), multi, a, up(nb))
    assert check(x).ok
    # the other focus is a tensor, so the context is not spent
    with pytest.raises(NotSpentError):
        lower_deriv(x, x.ctx.index(focused(up(TOP))))


# -- reduction ------------------------------------------------------------------------------

def eta_tensor():
    # |- a^ par b^, down(a (x) b)
    inner = mk_decide(mk_tensor(mk_ax((), "a"), mk_ax((), "b"), a, b))
    return mk_par(inner, na, nb)


def test_principal_tensor_par():
    dd = mk_tensor(mk_ax((), "a"), mk_ax((), "b"), a, b)
    cut = mk_cut(dd, eta_tensor(), tensor(a, b))
    tr = rewrite.ReductionTrace()
    out = reduce_step(cut, flexible=True, trace=tr)
    assert out.conclusion == Inv((), [na, nb, down(tensor(a, b))])
    assert check(out).ok and is_cut_free(out)
    names = [s.name for s in tr.steps]
    assert names[0] == "cut.principal-tensor"
    # first the left component, then the right
    assert [s.before.formula_size for s in tr.steps[1:3]] == [1, 1]


def test_principal_shift(badcut):
    tr = rewrite.ReductionTrace()
    out = reduce_step(badcut, trace=tr)
    assert tr.steps[0].name == "cut.principal-shift"
    assert tr.steps[0].after.formula_size == 4 < tr.steps[0].before.formula_size
    assert check(out).ok


def test_reduce_step_requires_cut_root(mfp):
    with pytest.raises(InvalidInput):
        reduce_step(mfp)


def test_focus_free_cut_strict_vs_flexible():
    e = mk_decide(mk_ax((), "a"))
    cut = mk_cut(mk_ax((), "a"), e, a)
    with pytest.raises(IllFormedCut):
        reduce_step(cut)
    with pytest.raises(IllFormedCut):
        normalize(cut)
    out, tr = normalize(cut, flexible=True)
    assert out.conclusion == Inv((), [na, down(a)])
    assert check(out).ok and tr.coercions
    # oracle: no rule concludes the focused variant, the inversion one is provable
    focused_variant = Foc((), [passive(na), passive(down(a))])
    assert list(Searcher(SearchBudget(6)).candidates(focused_variant)) == []
    assert prove(Inv((), [na, down(a)]), SearchBudget(6)) is not None


def test_small_focused_cut_to_axiom():
    ax = mk_ax((), "a")
    cut = mk_fcut(ax, ax, a)
    assert check(cut).ok
    out, tr = normalize(cut)
    assert out.rule == "ax" and len(tr) <= 4
    assert enumerate_proofs(cut.conclusion, SearchBudget(4)) == [out]


def test_normalize_cut_free_unchanged(mfp):
    out, tr = normalize(mfp)
    assert out is mfp and len(tr) == 0


def test_bad_cut_normalizes(badcut):
    out, tr = normalize(badcut, paranoid=True)
    want = Foc((), [passive(down(tensor(a, up(nb)))), focused(up(BOT)), passive(na), passive(nc),
                    passive(down(tensor(c, up(nd)))), passive(down(tensor(b, d)))])
    assert out.conclusion == want == badcut.conclusion
    assert is_cut_free(out) and check(out).ok
    assert tr.strictly_decreasing()
    assert tr.intermediates and all(check(x).ok for x in tr.intermediates)


def test_trace_line_format(badcut):
    _, tr = normalize(badcut)
    assert tr.lines()[0] == "step=cut.principal-shift path=/ measure=(5,0,19) -> (4,0,17)"
    assert tr.lines()[-1].endswith("-> (0,0,0)")


def test_persistent_cut_with_copies():
    one_proof = mk_decide(mk_one())                     # |- down 1
    body = mk_bot(mk_bot(mk_top((), [TOP])))            # |- top, bot, bot
    p = up(BOT)
    e = mk_decide(weaken(mk_release(body, [BOT, BOT]), [p]), [p, p])   # |- p : top
    cut = mk_cut_bang(one_proof, e, p)
    assert check(cut).ok
    out, tr = normalize(cut, paranoid=True)
    assert out.conclusion == Inv((), [TOP]) and check(out).ok
    names = [s.name for s in tr.steps]
    assert "bang.decide-copies" in names
    assert names.count("cut.principal-shift") == 2
    assert tr.strictly_decreasing()


def test_acut_has_no_reduction():
    e = mk_decide(mk_ax((), "a"))
    cut = mk_acut(mk_ax((), "a"), e, a, activate=[a])
    with pytest.raises(InvalidInput):
        reduce_step(cut)


def test_measure_order():
    assert CutMeasure(2, 1, 0) < CutMeasure(3, 0, 0)
    assert CutMeasure(3, 0, 99) < CutMeasure(3, 1, 1)
    engine = rewrite.Engine()
    frame = rewrite._Frame(engine, "probe", CutMeasure(3, 0, 5))
    with pytest.raises(TerminationError):
        frame.spawn(CutMeasure(3, 0, 5))


# -- properties --------------------------------------------------------------------------------

@given(proofs(kind="foc"), st.data())
def test_decomposition_exact(deriv, data):
    idx = data.draw(st.sampled_from(focus_indices(deriv)))
    res = decompose(deriv, idx)
    assert is_spent(res.sigma)
    assert check(res.core).ok
    assert dsize(res.core) + res.suffix.size == dsize(deriv)
    # the suffix may reorder commuting steps, so compare conclusions
    replayed = res.suffix.replay(res.core)
    assert replayed.conclusion == deriv.conclusion and check(replayed).ok
    plug = spent_plug(deriv.per, res.sigma, [up(BOT)])
    assert check(res.suffix.replay(plug)).ok


@given(proofs(kind="foc"), st.data())
def test_lowering_preserves_skeleton(deriv, data):
    idx = data.draw(st.sampled_from(focus_indices(deriv)))
    core = decompose(deriv, idx).core
    out = lower_deriv(core, core.ctx.index(deriv.ctx[idx]))
    assert skeleton(out) == skeleton(core)
    assert check(out).ok


@given(st.integers(0, 2**32 - 1), st.sampled_from(["cut", "fcut", "cutBang", "fcutBang"]))
def test_random_cuts_normalize(seed, kind):
    rng = random.Random(seed)
    inst = cut_instance(rng, kind, size=rng.randint(2, 7), synth=Synth(rng))
    if inst is None:
        return
    out, tr = normalize(inst, flexible=True)
    assert is_cut_free(out) and check(out).ok
    assert tr.strictly_decreasing()
    if out.conclusion != inst.conclusion:
        assert tr.coercions and out.conclusion.kind == INV
