import json

import pytest

from llmfoc.cli import run
from llmfoc.kernel import check, is_cut_free
from llmfoc.proofio import load_proof, parse_proof

MFP_SEQ = ("(inv (per) (ctx (natom a) (natom c) (down (tensor (atom a) (up (natom b))))"
           " (down (tensor (atom b) (atom d))) (down (tensor (atom c) (up (natom d))))))")


@pytest.fixture(autouse=True)
def no_color(monkeypatch):
    monkeypatch.setenv("LLMFOC_COLOR", "0")


def p(proofs_dir, name):
    return str(proofs_dir / name)


def test_check_ok(proofs_dir, capsys):
    assert run(["check", p(proofs_dir, "multifocus.llm")]) == 0
    assert capsys.readouterr().out.strip() == "ok"


def test_check_violations(proofs_dir, capsys):
    assert run(["check", p(proofs_dir, "empty-release.llm")]) == 1
    out = capsys.readouterr().out
    assert "release: Δ must be non-empty" in out
    assert run(["check", p(proofs_dir, "empty-decide.llm")]) == 1
    assert "decide: Per^{vec n} or Θ must be non-empty" in capsys.readouterr().out


def test_check_many_json(proofs_dir, capsys):
    files = [p(proofs_dir, "multifocus.llm"), p(proofs_dir, "empty-release.llm")]
    assert run(["check", "--json", *files]) == 1
    data = json.loads(capsys.readouterr().out)
    assert [d["ok"] for d in data] == [True, False]


def test_missing_file_and_parse_error(tmp_path, capsys):
    assert run(["check", str(tmp_path / "nope.llm")]) == 2
    bad = tmp_path / "bad.llm"
    bad.write_text("(proof (inv (per) (ctx (atom")
    assert run(["check", str(bad)]) == 2
    assert run(["bogus"]) == 2
    capsys.readouterr()


def test_cutelim_trace(proofs_dir, capsys):
    assert run(["cutelim", p(proofs_dir, "badcut.llm"), "--trace", "--paranoid"]) == 0
    cap = capsys.readouterr()
    lines = cap.err.strip().splitlines()
    assert lines[0] == "step=cut.principal-shift path=/ measure=(5,0,19) -> (4,0,17)"
    assert all(l.startswith("step=") for l in lines)
    d = parse_proof(cap.out)
    assert is_cut_free(d) and check(d).ok


def test_cutelim_json_to_file(proofs_dir, tmp_path, capsys):
    out = tmp_path / "out.json"
    assert run(["cutelim", p(proofs_dir, "badcut.llm"), "--json", "--trace", "-o", str(out)]) == 0
    assert capsys.readouterr().out == ""
    data = json.loads(out.read_text())
    assert data["cut_free"] and data["valid"] and data["trace"]


def test_cutelim_strict_focus_free(tmp_path, capsys):
    f = tmp_path / "ff.llm"
    f.write_text("(proof (foc (per) (ctx (natom a) (down (atom a))))"
                 " (cut (atom a) (left 0) (ax)"
                 " (decide (copies) (theta 1) (ax))))")
    assert run(["check", str(f)]) == 1
    assert run(["cutelim", str(f)]) == 1
    assert run(["cutelim", "--flexible", str(f)]) == 1
    capsys.readouterr()


def test_decompose(proofs_dir, tmp_path, capsys):
    sub = tmp_path / "upper.llm"
    from llmfoc.corpus import multifocus_proof
    from llmfoc.kernel import subtree
    from llmfoc.proofio import print_proof
    upper = subtree(multifocus_proof(), (0,))
    sub.write_text(print_proof(upper))
    idx = next(i for i, it in enumerate(upper.ctx) if it.focus)
    assert run(["decompose", str(sub), "--focus", str(idx)]) == 0
    assert "exact" in capsys.readouterr().out
    assert run(["decompose", str(sub), "--focus", str(idx), "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["sizes"]["exact"]
    passive_idx = next(i for i, it in enumerate(upper.ctx) if not it.focus)
    assert run(["decompose", str(sub), "--focus", str(passive_idx)]) == 1
    capsys.readouterr()
    assert run(["decompose", p(proofs_dir, "multifocus.llm"), "--focus", "0"]) == 1
    capsys.readouterr()


def test_lower(tmp_path, capsys):
    from llmfoc.corpus import multifocus_proof
    from llmfoc.kernel import focused, skeleton, subtree
    from llmfoc.proofio import print_proof
    from llmfoc.syntax import natom, up
    rel = subtree(multifocus_proof(), (0, 1, 1))
    f = tmp_path / "rel.llm"
    f.write_text(print_proof(rel))
    idx = rel.ctx.index(focused(up(natom("d"))))
    assert run(["lower", str(f), "--focus", str(idx)]) == 0
    out = parse_proof(capsys.readouterr().out)
    assert check(out).ok and skeleton(out) == skeleton(rel)
    assert len([it for it in out.ctx if it.focus]) == 1
    assert run(["lower", str(f)]) == 1
    assert "ambiguous" in capsys.readouterr().err


def test_erase_phases_maximal(proofs_dir, capsys):
    ex = p(proofs_dir, "multifocus.llm")
    assert run(["lower", ex]) == 1
    capsys.readouterr()
    assert run(["erase", ex]) == 0
    assert capsys.readouterr().out.rstrip().endswith("; dyadic: valid")
    assert run(["phases", ex]) == 0
    assert capsys.readouterr().out.startswith("phases: 2")
    assert run(["maximal", ex, "--depth", "8", "--assert-maximal"]) == 0
    assert capsys.readouterr().out.splitlines() == ["decide@/: maximal", "decide@/0/1/1/0: maximal"]


def test_maximal_assert_fails_after_cutelim(proofs_dir, tmp_path, capsys):
    out = tmp_path / "nf.llm"
    assert run(["cutelim", p(proofs_dir, "badcut.llm"), "-o", str(out)]) == 0
    assert run(["maximal", str(out), "--depth", "10", "--assert-maximal"]) == 1
    assert "extendable(" in capsys.readouterr().out


def test_search(capsys):
    assert run(["search", "(inv (per) (ctx (natom a) (down (atom a))))", "--depth", "3"]) == 0
    d = parse_proof(capsys.readouterr().out)
    assert d.rule == "decide" and check(d).ok
    assert run(["search", "(inv (per) (ctx (natom a)))", "--depth", "5"]) == 1
    assert "no proof found" in capsys.readouterr().out
    assert run(["search", "(foc (per) (ctx (natom a) (natom b)))", "--depth", "3"]) == 2
    capsys.readouterr()


def test_search_all_json(capsys):
    assert run(["search", MFP_SEQ, "--depth", "8", "--all", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["count"] == 2 and len(data["proofs"]) == 2


def test_color(proofs_dir, monkeypatch, capsys):
    monkeypatch.setenv("LLMFOC_COLOR", "1")
    run(["check", p(proofs_dir, "multifocus.llm")])
    assert "\x1b[32m" in capsys.readouterr().out
