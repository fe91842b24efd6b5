"""End-to-end tests for the command line interface."""

import io
import sys

import pytest

from tela import FALSE, Tela, inf_, parse_hoa, print_hoa
from tela.acceptance import gba_marksets
from tela.cli import main
from tela.core import is_complete, is_deterministic
from tela.determinize import empty_language_automaton
from tela.limitdet import build_gfm
from tela.randbench import cnf_blowup_automaton, random_tela
from tela.transforms import ensure_dnf

from helpers import EXAMPLE_MDP, example_automaton


def universal_automaton():
    return Tela(
        ap=("a",),
        n_states=1,
        initial=frozenset({0}),
        transitions=((0, 0, 0, 1), (0, 1, 0, 1)),
        acceptance=inf_(1),
        n_marks=1,
    )


def write_hoa(tmp_path, name, a):
    path = tmp_path / name
    path.write_text(print_hoa(a))
    return str(path)


def test_convert_emits_a_gba(tmp_path, capsys):
    path = write_hoa(tmp_path, "ex.hoa", example_automaton())
    assert main(["convert", "--to", "gba", path]) == 0
    out = parse_hoa(capsys.readouterr().out)
    assert gba_marksets(out.acceptance) is not None


def test_convert_reads_stdin_by_default(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO(print_hoa(example_automaton())))
    assert main(["convert", "--to", "gba", "--method", "remfin_rewrite"]) == 0
    parse_hoa(capsys.readouterr().out)


def test_determinize_fig2_instance(tmp_path, capsys):
    path = write_hoa(tmp_path, "fig2.hoa", cnf_blowup_automaton(3))
    assert main(["determinize", path]) == 0
    first = capsys.readouterr().out
    out = parse_hoa(first)
    assert is_deterministic(out)
    assert is_complete(out)

    assert main(["determinize", path]) == 0
    assert capsys.readouterr().out == first


def test_determinize_methods_and_state_cap(tmp_path, capsys):
    path = write_hoa(tmp_path, "ex.hoa", example_automaton())
    for method in ("product-nolangcover", "via-gba:cnf", "via-gba:remfin_split"):
        assert main(["determinize", "--method", method, path]) == 0
        assert is_deterministic(parse_hoa(capsys.readouterr().out))

    blown = write_hoa(tmp_path, "blow.hoa", cnf_blowup_automaton(4))
    assert main(["determinize", "--state-cap", "2", blown]) == 3
    err = capsys.readouterr().err
    assert err.startswith("error:")


def test_limitdet_methods_output_limit_deterministic(tmp_path, capsys):
    path = write_hoa(tmp_path, "ex.hoa", example_automaton())
    for method in ("sum", "ld", "gfm"):
        assert main(["limitdet", "--method", method, path]) == 0
        produced = tmp_path / f"{method}.hoa"
        produced.write_text(capsys.readouterr().out)
        assert main(["check", "limitdet", str(produced)]) == 0
        assert capsys.readouterr().out == "SYNTACTIC\n"


def test_check_empty(tmp_path, capsys):
    uni = universal_automaton()
    empty_path = write_hoa(tmp_path, "empty.hoa", uni.with_acceptance(FALSE, 1))
    assert main(["check", "empty", empty_path]) == 0
    assert capsys.readouterr().out == "EMPTY\n"

    uni_path = write_hoa(tmp_path, "uni.hoa", uni)
    assert main(["check", "empty", uni_path]) == 1
    out = capsys.readouterr().out
    assert "|" in out
    assert "EMPTY" not in out
    prefix, _, cycle = out.partition("|")
    assert cycle.strip()


def test_check_deterministic(tmp_path, capsys):
    det = write_hoa(tmp_path, "det.hoa", empty_language_automaton(("a",)))
    assert main(["check", "deterministic", det]) == 0
    assert capsys.readouterr().out == "DETERMINISTIC\n"

    nondet = write_hoa(tmp_path, "nd.hoa", example_automaton())
    assert main(["check", "deterministic", nondet]) == 1
    assert capsys.readouterr().out == "NONDETERMINISTIC\n"


def test_check_limitdet_answers(tmp_path, capsys):
    path = write_hoa(tmp_path, "ex.hoa", example_automaton())
    assert main(["check", "limitdet", path]) == 1
    assert capsys.readouterr().out == "NO\n"

    det = write_hoa(tmp_path, "det.hoa", empty_language_automaton(("a",)))
    assert main(["check", "limitdet", det]) == 0
    assert capsys.readouterr().out == "SYNTACTIC\n"


def test_mc_quantitative(tmp_path, capsys):
    mdp = tmp_path / "m.mdp"
    mdp.write_text(EXAMPLE_MDP)
    aut = write_hoa(tmp_path, "ex.hoa", example_automaton())
    assert main(["mc", "--mdp", str(mdp), "--aut", aut, "--quant"]) == 0
    assert capsys.readouterr().out == "1.000000000000\n"


def test_mc_qualitative(tmp_path, capsys):
    mdp = tmp_path / "m.mdp"
    mdp.write_text(EXAMPLE_MDP)

    gfm = write_hoa(tmp_path, "gfm.hoa", build_gfm(ensure_dnf(example_automaton())))
    assert main(["mc", "--mdp", str(mdp), "--aut", gfm, "--qual"]) == 0
    assert capsys.readouterr().out == "POSITIVE\n"

    zero = write_hoa(tmp_path, "zero.hoa", empty_language_automaton(("p", "q")))
    assert main(["mc", "--mdp", str(mdp), "--aut", zero, "--qual"]) == 1
    assert capsys.readouterr().out == "ZERO\n"

    raw = write_hoa(tmp_path, "raw.hoa", example_automaton())
    assert main(["mc", "--mdp", str(mdp), "--aut", raw, "--qual"]) == 3
    assert "not limit-deterministic" in capsys.readouterr().err


def test_random_seeded_is_reproducible(capsys):
    argv = ["random", "--states", "4", "--marks", "4", "--seed", "9"]
    assert main(argv) == 0
    first = capsys.readouterr()
    assert first.err == ""
    assert main(argv) == 0
    assert capsys.readouterr().out == first.out
    expected = random_tela(
        n_states=4, n_marks=4, edge_density=0.5, mark_prob=0.2,
        acc="random-el", seed=9, n_ap=2,
    )
    assert parse_hoa(first.out) == expected


def test_random_without_seed_reports_one(capsys):
    assert main(["random", "--states", "4", "--marks", "2"]) == 0
    captured = capsys.readouterr()
    assert captured.err.startswith("seed: ")
    int(captured.err.split(":", 1)[1])
    parse_hoa(captured.out)


def test_bench_report_to_stdout(tmp_path, capsys):
    cfg = tmp_path / "bench.cfg"
    cfg.write_text("family=fig2\nfig2=1..2\nreport=-\n")
    assert main(["bench", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("telabench 1\n")
    assert "mismatches=0" in out


def test_bench_report_to_file(tmp_path, capsys):
    report = tmp_path / "report.txt"
    cfg = tmp_path / "bench.cfg"
    cfg.write_text(f"family=fig2\nfig2=1..2\nreport={report}\n")
    assert main(["bench", "--config", str(cfg)]) == 0
    table = capsys.readouterr().out
    assert table.splitlines()[0].startswith("method")
    assert "0 mismatches" in table
    assert report.read_text().startswith("telabench 1\n")


def test_bad_inputs_exit_3(tmp_path, capsys):
    assert main(["check", "empty", str(tmp_path / "missing.hoa")]) == 3
    assert capsys.readouterr().err.startswith("error:")

    bad = tmp_path / "bad.hoa"
    bad.write_text("HOA: v1\nmystery\n")
    assert main(["check", "empty", str(bad)]) == 3
    assert "line 2" in capsys.readouterr().err

    cfg = tmp_path / "bad.cfg"
    cfg.write_text("pipeline=warp\n")
    assert main(["bench", "--config", str(cfg)]) == 3
    assert "pipeline" in capsys.readouterr().err


def test_usage_errors_exit_2(tmp_path, capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["check", "bogus", "x"])
    assert excinfo.value.code == 2
    with pytest.raises(SystemExit) as excinfo:
        main([])
    assert excinfo.value.code == 2
    with pytest.raises(SystemExit) as excinfo:
        main(["mc", "--mdp", "m", "--aut", "a"])
    assert excinfo.value.code == 2
    capsys.readouterr()
