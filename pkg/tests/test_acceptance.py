"""Acceptance criteria 1-9.  Each test prints one PASS/FAIL line."""

import functools
import random
import time

import pytest

from llmfoc.analysis import check_dyadic, check_maximal, erase_derivation, phases
from llmfoc.corpus import bad_cut, multifocus_proof
from llmfoc.gen import Synth, cut_instance, random_focctx, random_formula
from llmfoc.kernel import (
    FOC, INV, Foc, activation_paths, activations, check, dheight, dsize, foci, focused,
    is_cut_free, is_spent, iter_nodes, neutralise, passive, skeleton,
)
from llmfoc.proofio import load_proof, parse_proof, print_proof
from llmfoc.rewrite import decompose, lower_deriv, normalize
from llmfoc.search import SearchBudget, enumerate_proofs
from llmfoc.syntax import BOT, TOP, atom, down, natom, parse_formula, print_formula, tensor, up
from strategies import spent_plug

SEED = 20261017
_GENERATED = {}


def report(capsys, n, ok, detail):
    with capsys.disabled():
        print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


# -- shared generators ------------------------------------------------------------------

def _multi(d):
    return sum(1 for f in foci(d.ctx) if f.op != "up") >= 2


@functools.lru_cache(maxsize=None)
def search_pool():
    """Focused subderivations of search-enumerated proofs, height at most 7."""
    rng = random.Random(SEED)
    synth = Synth(rng, multifocus=0.8)
    pool = {}
    tries = 0
    while (len(pool) < 250 or sum(map(_multi, pool)) < 60) and tries < 5000:
        tries += 1
        size = rng.randint(2, 7)
        d = synth.foc(size) if rng.random() < 0.6 else synth.inv(size)
        for found in enumerate_proofs(d.conclusion, SearchBudget(7, limit=40, copy_cap=1)):
            for _, n in iter_nodes(found):
                if n.conclusion.kind == FOC and n.rule not in ("ax", "one"):
                    pool.setdefault(n, None)
    return list(pool)


def _names(f):
    if f.op in ("atom", "natom"):
        return {f.name}
    return set().union(*map(_names, f.args)) if f.args else set()


def _atoms(d):
    s = d.conclusion
    fs = s.per + (foci(s.ctx) + tuple(it.formula for it in s.ctx if not it.focus)
                  if s.kind == FOC else s.ctx)
    return set().union(*map(_names, fs)) if fs else set()


# -- criteria -----------------------------------------------------------------------------

def test_criterion_1_golden(capsys):
    ex = multifocus_proof()
    ok_check = check(ex).ok and load_proof_from_corpus("multifocus.llm") == ex
    u = erase_derivation(ex)
    widths = [p.width for p in phases(ex)]
    ok = ok_check and check_dyadic(u) == [] and widths == [2, 1]
    report(capsys, 1, ok, f"check={ok_check} dyadic={check_dyadic(u) == []} phase widths={widths}")


def load_proof_from_corpus(name):
    from pathlib import Path
    return load_proof(Path(__file__).resolve().parent.parent / "proofs" / name)


def test_criterion_2_side_conditions(capsys):
    rel = [str(v) for v in check(load_proof_from_corpus("empty-release.llm")).violations]
    dec = [str(v) for v in check(load_proof_from_corpus("empty-decide.llm")).violations]
    ok_rel = "/: release: Δ must be non-empty" in rel
    ok_dec = "/: decide: Per^{vec n} or Θ must be non-empty" in dec
    good = [check(load_proof_from_corpus(n)).ok for n in ("release-ok.llm", "decide-ok.llm")]
    ok = ok_rel and ok_dec and all(good)
    report(capsys, 2, ok, f"release rejected={ok_rel} decide rejected={ok_dec} fixed accepted={good}")


def test_criterion_3_decomposition(capsys):
    pool = search_pool()
    _GENERATED["pool"] = pool
    cores = []
    cases = failures = 0
    for d in pool:
        assert dheight(d) <= 7 and len(_atoms(d)) <= 4 and check(d).ok
        for i, it in enumerate(d.ctx):
            if not it.focus:
                continue
            cases += 1
            res = decompose(d, i)
            good = dsize(res.core) + res.suffix.size == dsize(d) and is_spent(res.sigma)
            plugs = [spent_plug(d.per, res.sigma, [up(BOT)]),
                     spent_plug(d.per, res.sigma, [up(TOP), up(natom("a"))])]
            for plug in plugs:
                good &= check(res.suffix.replay(plug)).ok
            good &= check(res.suffix.replay(res.core)).ok
            failures += not good
            cores.append((res.core, res.core.ctx.index(it)))
    _GENERATED["cores"] = cores
    multi = sum(map(_multi, pool))
    ok = len(pool) >= 200 and failures == 0
    report(capsys, 3, ok, f"derivations={len(pool)} multifocused={multi} focus choices={cases} failures={failures}")


def _cores():
    if "cores" not in _GENERATED:
        _GENERATED["cores"] = [(decompose(d, i).core, decompose(d, i).core.ctx.index(it))
                               for d in search_pool() for i, it in enumerate(d.ctx) if it.focus]
    return _GENERATED["cores"]


def test_criterion_4_lowering(capsys):
    cases = nontrivial = failures = 0
    lowered = []
    seen = set()
    for core, idx in _cores():
        if (core, idx) in seen:
            continue
        seen.add((core, idx))
        cases += 1
        rest = list(core.ctx)
        del rest[idx]
        nontrivial += bool(foci(rest))
        out = lower_deriv(core, idx)
        lowered.append(out)
        failures += not (skeleton(out) == skeleton(core) and check(out).ok)
    _GENERATED["lowered"] = lowered
    ok = cases >= 200 and failures == 0
    report(capsys, 4, ok, f"spent derivations={cases} with spent foci={nontrivial} failures={failures}")


def test_criterion_5_cut_elimination(capsys):
    rng = random.Random(SEED)
    synth = Synth(rng)
    kinds = ["cut", "fcut", "cutBang", "fcutBang"]
    counts = dict.fromkeys(kinds, 0)
    outputs = []
    failures = []
    coercions = 0
    start = time.perf_counter()
    attempts = 0
    while sum(counts.values()) < 240 and attempts < 5000:
        kind = kinds[attempts % 4]
        attempts += 1
        inst = cut_instance(rng, kind, size=rng.randint(2, 7), synth=synth)
        if inst is None:
            continue
        counts[kind] += 1
        out, tr = normalize(inst, flexible=True)
        good = is_cut_free(out) and check(out).ok and tr.strictly_decreasing()
        if out.conclusion != inst.conclusion:
            good &= bool(tr.coercions) and out.conclusion.kind == INV
            coercions += 1
        if not good:
            failures.append(print_proof(inst))
        outputs.append(out)
    elapsed = time.perf_counter() - start
    _GENERATED["normalized"] = outputs
    ok = sum(counts.values()) >= 200 and all(counts.values()) and not failures and elapsed < 60
    report(capsys, 5, ok, f"instances={counts} coerced={coercions} failures={len(failures)} time={elapsed:.1f}s")


def test_criterion_6_bad_cut_scenario(capsys):
    cut = bad_cut()
    out, tr = normalize(cut)
    a, b, c, d = (atom(x) for x in "abcd")
    want = Foc((), [passive(down(tensor(a, up(natom("b"))))), focused(up(BOT)), passive(natom("a")),
                    passive(natom("c")), passive(down(tensor(c, up(natom("d"))))),
                    passive(down(tensor(b, d)))])
    ok_nf = is_cut_free(out) and check(out).ok and out.conclusion == want
    ex_max = check_maximal(multifocus_proof(), 10).all_maximal
    ext = check_maximal(out, 10).extendable()
    _GENERATED["badcut"] = [out]
    ok = ok_nf and ex_max and bool(ext)
    detail = ", ".join(v.line() for v in ext)
    report(capsys, 6, ok, f"normal form={ok_nf} example maximal={ex_max} extendable: {detail}")


def test_criterion_7_erasure(capsys):
    proofs = [multifocus_proof()]
    for key in ("pool", "lowered", "normalized", "badcut"):
        proofs += _GENERATED.get(key, [])
    proofs += [core for core, _ in _cores()]
    if "normalized" not in _GENERATED:
        pytest.skip("criterion 5 did not run")
    bad = sum(1 for p in proofs if check_dyadic(erase_derivation(p)))
    ok = bad == 0 and len(proofs) > 600
    report(capsys, 7, ok, f"proofs erased={len(proofs)} rejected={bad}")


def test_criterion_8_activation(capsys):
    rng = random.Random(SEED)
    total = dup = failures = 0
    for _ in range(600):
        psi = random_focctx(rng, size=7)
        total += 1
        k = sum(1 for it in psi if not it.focus and it.formula.op == "down")
        paths = activation_paths(psi)
        base = neutralise(psi)
        good = len(paths) == 2 ** k and set(paths) == activations(psi)
        good &= all(neutralise(x) == base for x in paths)
        downs = [it for it in psi if not it.focus and it.formula.op == "down"]
        dup += len(set(downs)) < len(downs)
        failures += not good
    ok = total >= 500 and failures == 0
    report(capsys, 8, ok, f"contexts={total} with repeated down passives={dup} failures={failures}")


def test_criterion_9_round_trip(capsys):
    rng = random.Random(SEED)
    fbad = 0
    for i in range(1200):
        f = random_formula(rng, i % 2 == 0, depth=4)
        text = print_formula(f)
        fbad += print_formula(parse_formula(text)) != text
    synth = Synth(rng)
    proofs = []
    while len(proofs) < 150:
        k = len(proofs) % 3
        if k == 0:
            proofs.append(synth.foc(rng.randint(1, 8)))
        elif k == 1:
            proofs.append(synth.inv(rng.randint(1, 8)))
        else:
            inst = cut_instance(rng, ["cut", "fcut", "cutBang", "fcutBang"][len(proofs) % 4], synth=synth)
            if inst is not None:
                proofs.append(inst)
    pbad = 0
    for d in proofs:
        text = print_proof(d)
        pbad += print_proof(parse_proof(text)) != text
    ok = fbad == 0 and pbad == 0
    report(capsys, 9, ok, f"formulas=1200 mismatches={fbad} proofs={len(proofs)} mismatches={pbad}")
