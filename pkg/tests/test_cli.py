"""Command-line behavior: output shapes and the exit-code contract."""

import json

import pytest

from revseq.cli import main
from revseq.reproduce import golden_table_text


@pytest.fixture(autouse=True)
def plain_output(monkeypatch):
    monkeypatch.setenv("REVSEQ_COLOR", "0")


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_gates_list_text(capsys):
    code, out, _ = run(capsys, "gates", "list")
    assert code == 0
    assert "MG1" in out and "4x4" in out
    assert out.splitlines()[0].startswith("NOT")


def test_gates_list_json(capsys):
    code, out, _ = run(capsys, "gates", "list", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert [g["name"] for g in data][:2] == ["NOT", "FG"]
    assert data[5]["inputs"] == ["A", "B", "C", "D"]


def test_gates_table_csv_matches_golden(capsys):
    code, out, _ = run(capsys, "gates", "table", "MG1", "--format", "csv")
    assert code == 0
    assert out == golden_table_text(1)


def test_gates_table_text_headers(capsys):
    code, out, _ = run(capsys, "gates", "table", "FG")
    lines = out.splitlines()
    assert lines[0] == "A B | P Q"
    assert lines[1:] == ["0 0 | 0 0", "0 1 | 0 1", "1 0 | 1 1", "1 1 | 1 0"]


def test_gates_table_unknown_gate_exits_2(capsys):
    code, _, err = run(capsys, "gates", "table", "NOPE")
    assert code == 2
    assert "unknown gate 'NOPE'" in err


def test_gates_verify_ok(capsys):
    code, out, _ = run(capsys, "gates", "verify", "FRG")
    assert code == 0
    assert "bijective" in out


def test_gates_file_extends_registry(capsys, tmp_path):
    f = tmp_path / "extra.rgate"
    f.write_text("gate SWAP2(2) perm = [0, 2, 1, 3]\n")
    code, out, _ = run(capsys, "gates", "table", "SWAP2", "--gates", str(f))
    assert code == 0
    assert out.splitlines()[2] == "0 1 | 1 0"


def test_gates_file_name_clash_exits_2(capsys, tmp_path):
    f = tmp_path / "clash.rgate"
    f.write_text("gate MG1(4) perm = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15]\n")
    code, _, err = run(capsys, "gates", "table", "MG1", "--gates", str(f))
    assert code == 2
    assert "already registered" in err


def test_circuit_check_builtin(capsys):
    code, out, _ = run(capsys, "circuit", "check", "@d_latch")
    assert code == 0
    assert "warning[FANOUT]" in out
    assert "0 error(s), 1 warning(s)" in out


def test_circuit_check_strict_fanout(capsys):
    code, out, _ = run(capsys, "circuit", "check", "@d_latch", "--strict-fanout")
    assert code == 1
    assert "error[FANOUT]" in out


def test_circuit_check_parse_error_exits_2(capsys, tmp_path):
    f = tmp_path / "bad.rseq"
    f.write_text("circuit bad\ninput A,\n")
    code, _, err = run(capsys, "circuit", "check", str(f))
    assert code == 2
    assert "2:" in err  # position points at the offending line


def test_circuit_check_missing_file_exits_2(capsys):
    code, _, err = run(capsys, "circuit", "check", "does_not_exist.rseq")
    assert code == 2
    assert "no such file" in err


def test_circuit_table_csv(capsys):
    code, out, _ = run(capsys, "circuit", "table", "@d_latch", "--format", "csv")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "CLK,D,Q,Q_next,out_Q,out_Qn"
    assert len(lines) == 9
    assert lines[1] == "0,0,0,0,0,1"
    assert lines[-1] == "1,1,1,1,1,0"


def test_circuit_table_json_sections(capsys):
    code, out, _ = run(capsys, "circuit", "table", "@d_latch", "--format", "json")
    rows = json.loads(out)
    assert len(rows) == 8
    assert rows[5]["inputs"] == {"CLK": 1, "D": 0}
    assert rows[5]["state"] == {"Q": 1}
    assert rows[5]["next_state"] == {"Q": 0}  # transparent: next Q follows D


def test_circuit_simulate_inline_stim(capsys):
    code, out, _ = run(capsys, "circuit", "simulate", "@d_latch",
                       "--stim", "CLK=1,D=1; CLK=0,D=0", "--format", "csv")
    assert code == 0
    assert out.splitlines()[1] == "0,1,1,1,0,1"


def test_circuit_simulate_stim_file(capsys, fixtures_dir):
    code, out, _ = run(capsys, "circuit", "simulate", "@d_latch",
                       "--stim", f"@{fixtures_dir / 'stim_d_latch.txt'}",
                       "--format", "csv")
    assert code == 0
    assert len(out.splitlines()) == 4


def test_circuit_simulate_requires_stim(capsys):
    code, _, err = run(capsys, "circuit", "simulate", "@d_latch")
    assert code == 2
    assert "--stim" in err


def test_circuit_simulate_oscillation_exits_3(capsys, fixtures_dir):
    code, _, err = run(capsys, "circuit", "simulate",
                       str(fixtures_dir / "osc.rseq"),
                       "--stim", "CLK=0", "--settle")
    assert code == 3
    assert "period 2" in err


def test_circuit_verify_pass(capsys):
    code, out, _ = run(capsys, "circuit", "verify", "@d_latch",
                       "--oracle", "(CLK & D) ^ (!CLK & Q)", "--next", "Q")
    assert code == 0
    assert "PASS 8/8" in out


def test_circuit_verify_fail_lists_rows(capsys):
    code, out, _ = run(capsys, "circuit", "verify", "@jk_latch",
                       "--oracle", "(!CLK & Q) ^ (CLK & ((J & !Q) ^ (K & Q)))",
                       "--next", "Q")
    assert code == 1
    assert "FAIL 12/16" in out
    assert "circuit 0, oracle 1" in out


def test_circuit_verify_requires_oracle_and_next(capsys):
    code, _, err = run(capsys, "circuit", "verify", "@d_latch",
                       "--oracle", "D")
    assert code == 2
    assert "--next" in err


def test_circuit_metrics_json(capsys):
    code, out, _ = run(capsys, "circuit", "metrics", "@ms_jk_ff",
                       "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert (data["gates"], data["garbage_declared"], data["delay"]) == (3, 3, 3)


def test_reproduce_single_table(capsys, tmp_path):
    code, out, _ = run(capsys, "reproduce", "--tables", "1",
                       "--out", str(tmp_path / "rp"))
    assert code == 0
    assert "table1: 16/16 rows match golden" in out
    assert (tmp_path / "rp" / "table1.csv").read_text() == golden_table_text(1)


def test_reproduce_all_tables(capsys, tmp_path):
    code, out, _ = run(capsys, "reproduce", "--out", str(tmp_path / "rp"))
    assert code == 0
    assert out.strip().splitlines()[-1] == "RESULT: all checks passed"
    for n in range(1, 7):
        assert (tmp_path / "rp" / f"table{n}.csv").exists()


def test_reproduce_rejects_unknown_table(capsys, tmp_path):
    code, _, err = run(capsys, "reproduce", "--tables", "9",
                       "--out", str(tmp_path / "rp"))
    assert code == 2
    assert "no such table" in err


def test_reproduce_rejects_non_numeric_tables(capsys, tmp_path):
    code, _, err = run(capsys, "reproduce", "--tables", "one",
                       "--out", str(tmp_path / "rp"))
    assert code == 2


def test_usage_error_exits_2(capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys)[0] == 2


def test_entry_raises_system_exit(monkeypatch):
    import revseq.cli as cli
    monkeypatch.setattr("sys.argv", ["revseq", "gates", "verify", "FG"])
    with pytest.raises(SystemExit) as exc:
        cli.entry()
    assert exc.value.code == 0
