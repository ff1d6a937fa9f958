import re
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from relaxsolve import family_spec, generate_problem, parse_problem_spec, read_csv
from relaxsolve.cli import main

CUSTOM_SPEC = (
    "id=custom\nn=12\nseed=4\ndiag=const:50\noffdiag=uniform:-1,1\nrhs=uniform:-5,5\n"
)

SMALL_PLAN = (
    "id=custom\nn=12\nseed=4\ndiag=const:50\noffdiag=uniform:-1,1\nrhs=uniform:-5,5\n"
    "variants=JBTVA,MJBTVA\nrepetitions=2\nbase_seed=6\n"
)


def _result_fields(line):
    m = re.fullmatch(
        r"generations=(\d+) elapsed_ms=([0-9.]+) final_residual=([^ ]+)", line.strip()
    )
    assert m, f"unexpected result line: {line!r}"
    return int(m.group(1)), float(m.group(2)), float(m.group(3))


def test_solve_family_converges(capsys):
    code = main(["solve", "--problem", "P1", "--variant", "MGSBTVA", "--seed", "7"])
    out = capsys.readouterr().out
    assert code == 0
    gens, _, resid = _result_fields(out.splitlines()[-1])
    assert gens > 0 and resid < 1e-7


def test_solve_stdout_is_deterministic_up_to_timing(capsys):
    argv = ["solve", "--problem", "P1", "--n", "40", "--variant", "JBTVA", "--seed", "3"]
    assert main(argv) == 0
    first = _result_fields(capsys.readouterr().out.splitlines()[-1])
    assert main(argv) == 0
    second = _result_fields(capsys.readouterr().out.splitlines()[-1])
    assert first[0] == second[0] and first[2] == second[2]


def test_solve_generation_cap_exit_code(capsys):
    code = main(
        ["solve", "--max-gens", "0", "--problem", "P1", "--variant", "JBTVA",
         "--seed", "1"]
    )
    out = capsys.readouterr().out
    assert code == 1
    assert out.startswith("generations=0 ")  # results still printed


def test_solve_divergent_family_reports_failure(capsys):
    # P5's off-diagonal mass at n=200 overwhelms its fixed diagonal of 50;
    # no relaxation factor converges, so the solver stops at the
    # divergence bound and the exit code reflects the failure.
    code = main(["solve", "--problem", "P5", "--variant", "MGSBTVA", "--seed", "7"])
    out = capsys.readouterr().out
    assert code == 1
    assert "final_residual=" in out


def test_solve_spec_file_with_trace(tmp_path, capsys):
    spec_file = tmp_path / "prob.txt"
    spec_file.write_text(CUSTOM_SPEC)
    svg = tmp_path / "trace.svg"
    code = main(
        ["solve", "--problem", str(spec_file), "--variant", "FIXED_GS_SR",
         "--seed", "2", "--trace", str(svg)]
    )
    assert code == 0
    root = ET.fromstring(svg.read_text())
    assert root.tag.endswith("svg")
    assert len(root.findall(".//{http://www.w3.org/2000/svg}polyline")) == 1


def test_unknown_subcommand_exits_2(capsys):
    assert main(["frobnicate"]) == 2
    assert capsys.readouterr().err != ""


def test_unknown_flag_exits_2(capsys):
    assert main(["solve", "--problem", "P1", "--variant", "JBTVA", "--bogus"]) == 2


def test_missing_required_flag_exits_2(capsys):
    assert main(["solve", "--problem", "P1"]) == 2


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0
    assert "solve" in capsys.readouterr().out
    assert main(["solve", "--help"]) == 0
    assert "--variant" in capsys.readouterr().out


def test_unreadable_problem_file_exits_3(tmp_path, capsys):
    missing = tmp_path / "nope.txt"
    code = main(["solve", "--problem", str(missing), "--variant", "JBTVA"])
    err = capsys.readouterr().err
    assert code == 3
    assert "cannot read" in err


def test_malformed_problem_file_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("n=abc\n")
    code = main(["solve", "--problem", str(bad), "--variant", "JBTVA"])
    err = capsys.readouterr().err
    assert code == 2
    assert "line 1" in err


def test_bad_seed_value_exits_2(capsys):
    assert main(["solve", "--problem", "P1", "--variant", "JBTVA", "--seed", "-4"]) == 2


def test_bench_end_to_end(tmp_path, capsys):
    plan = tmp_path / "plan.txt"
    plan.write_text(SMALL_PLAN)
    out_csv = tmp_path / "rows.csv"
    traces = tmp_path / "traces"
    code = main(
        ["bench", "--plan", str(plan), "--out", str(out_csv), "--traces", str(traces)]
    )
    stdout = capsys.readouterr().out
    assert code == 0
    with open(out_csv, encoding="utf-8") as fh:
        rows = read_csv(fh)
    assert len(rows) == 4
    assert {r.variant for r in rows} == {"JBTVA", "MJBTVA"}
    svg_files = sorted(p.name for p in traces.iterdir())
    assert svg_files == ["custom.svg"]
    ET.fromstring((traces / "custom.svg").read_text())
    assert "custom JBTVA:" in stdout and "custom MJBTVA:" in stdout
    assert "mean_generations=" in stdout


def test_bench_bad_plan_exits_2_without_csv(tmp_path, capsys):
    plan = tmp_path / "plan.txt"
    plan.write_text("problems=P1\nvariants=NOPE\n")
    out_csv = tmp_path / "rows.csv"
    code = main(["bench", "--plan", str(plan), "--out", str(out_csv)])
    assert code == 2
    assert not out_csv.exists()


def test_bench_missing_plan_exits_3(tmp_path):
    out_csv = tmp_path / "rows.csv"
    code = main(["bench", "--plan", str(tmp_path / "none.txt"), "--out", str(out_csv)])
    assert code == 3
    assert not out_csv.exists()


def test_bench_unwritable_out_exits_3(tmp_path, capsys):
    plan = tmp_path / "plan.txt"
    plan.write_text(SMALL_PLAN)
    code = main(
        ["bench", "--plan", str(plan), "--out", str(tmp_path / "no_dir" / "rows.csv")]
    )
    assert code == 3


def test_generate_round_trips_through_parser(tmp_path, capsys):
    out = tmp_path / "p6.txt"
    code = main(
        ["generate", "--problem", "P6", "--n", "6", "--seed", "3", "--out", str(out)]
    )
    assert code == 0
    text = out.read_text()
    spec = parse_problem_spec(text)
    assert spec == family_spec("P6", 6, 3)
    # the dumped entries match what the spec regenerates
    sys_ = generate_problem(spec)
    dumped = [ln for ln in text.splitlines() if ln.startswith("# A[1] =")]
    assert len(dumped) == 1
    first_row = [float(tok) for tok in dumped[0].split("=", 1)[1].split()]
    assert np.allclose(first_row, sys_.a[0], rtol=0, atol=0)
    dumped_b = [ln for ln in text.splitlines() if ln.startswith("# b =")]
    b_vals = [float(tok) for tok in dumped_b[0].split("=", 1)[1].split()]
    assert np.allclose(b_vals, sys_.b, rtol=0, atol=0)


def test_generate_unwritable_exits_3(tmp_path, capsys):
    code = main(
        ["generate", "--problem", "P6", "--n", "4", "--seed", "1", "--out",
         str(tmp_path / "no_dir" / "x.txt")]
    )
    assert code == 3


def test_console_script_is_installed():
    proc = subprocess.run(
        [sys.executable, "-m", "relaxsolve.cli", "--help"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "solve" in proc.stdout
