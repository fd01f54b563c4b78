import pytest

from synlab.automaton import cerny, dumps_dfa, loads_dfa
from synlab.cli import main
from synlab.csp import CspInstance, Constraint, dumps_csp


@pytest.fixture
def cnf_file(tmp_path):
    p = tmp_path / "f.cnf"
    p.write_text("p cnf 6 1\n3 5 0\n")
    return p


def test_cerny_command(capsys):
    assert main(["cerny", "--n", "4"]) == 0
    assert loads_dfa(capsys.readouterr().out) == cerny(4)


def test_solve_exact(tmp_path, capsys):
    p = tmp_path / "c.dfa"
    p.write_text(dumps_dfa(cerny(4)))
    assert main(["solve", "--input", str(p)]) == 0
    out = capsys.readouterr()
    assert out.out.splitlines()[0] == "9"
    assert '"outcome": "found"' in out.err


def test_solve_approx(tmp_path, capsys):
    p = tmp_path / "c.dfa"
    p.write_text(dumps_dfa(cerny(5)))
    assert main(["solve", "--input", str(p), "--alg", "approx", "--k", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert int(lines[0]) == len(lines[1].split())
    assert lines[2] == "phase,subset,word_length"


def test_solve_exit_codes(tmp_path, capsys):
    p = tmp_path / "c.dfa"
    p.write_text(dumps_dfa(cerny(6)))
    assert main(["solve", "--input", str(p), "--limit", "3"]) == 2
    assert main(["solve", "--input", str(p), "--budget-nodes", "10"]) == 2
    bad = tmp_path / "bad.dfa"
    bad.write_text("dfa 2 2\n0 1\n0\n")
    assert main(["solve", "--input", str(bad)]) == 1
    assert "bad.dfa:3:" in capsys.readouterr().err
    perm = tmp_path / "perm.dfa"
    perm.write_text("dfa 2 1\n1\n0\n")
    assert main(["solve", "--input", str(perm)]) == 1
    assert main(["solve", "--input", str(tmp_path / "missing.dfa")]) == 1


def test_reduce_tree(cnf_file, capsys):
    assert main(["reduce", "--input", str(cnf_file)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("N=6 M=1 states=16 mode=tree")
    assert "dfa 16 3" in out


def test_reduce_compressed_with_check(tmp_path):
    p = tmp_path / "phi.csp"
    p.write_text(dumps_csp(CspInstance(3, (Constraint((0, 2), ("01", "10")), Constraint((1,), ("1",))))))
    prefix = tmp_path / "out"
    assert main(["reduce", "--input", str(p), "--mode", "compressed", "--check", "--out", str(prefix)]) == 0
    dfa = loads_dfa((tmp_path / "out.dfa").read_text())
    sidecar = (tmp_path / "out.map").read_text().splitlines()
    assert len(sidecar) == dfa.n_states
    assert sidecar[0] == "0 - sink - -"


def test_gap_report(tmp_path, capsys):
    out = tmp_path / "gap.csv"
    assert main(["gap-report", "--corpus", "contradiction", "unsat-cnf", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "instance,N,M,states,val,upper,lower,gap,status"
    assert lines[1] == "contradiction,1,2,7,1/2,5,5,1.000000,ok"
    assert all(line.endswith(",ok") for line in lines[1:])


def test_gap_report_needs_input():
    assert main(["gap-report"]) == 1


def test_gap_report_budget_status(cnf_file, tmp_path):
    out = tmp_path / "gap.csv"
    assert main(["gap-report", "--input", str(cnf_file), "--budget-nodes", "3", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[1].endswith(",budget")


def test_expander_commands(capsys):
    assert main(["expander", "lambda", "--n", "5"]) == 0
    assert "5,dense,0.6656" in capsys.readouterr().out
    assert main(["expander", "walk", "--n", "5", "--k", "3", "--seed", "a5f"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines() == ["(4,0) (4,2) (4,3)", "bits_consumed 11"]
    assert main(["expander", "walk", "--n", "5", "--k", "9", "--seed", "1"]) == 1
    assert main(["expander", "amplify", "--n", "5", "--steps", "3", "--trials", "5000", "--seed", "beef"]) == 0
    first = capsys.readouterr().out
    main(["expander", "amplify", "--n", "5", "--steps", "3", "--trials", "5000", "--seed", "beef"])
    assert capsys.readouterr().out == first
    assert first.splitlines()[1].startswith("5,4,0.480000,5000,")


def test_bad_seed():
    assert main(["expander", "amplify", "--n", "5", "--seed", "zz"]) == 1
