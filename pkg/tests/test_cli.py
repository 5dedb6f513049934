import csv
import json
import subprocess
import sys

import pytest

from csvqe.cli import EXIT_INVARIANT, EXIT_OK, EXIT_PARSE, EXIT_RESOURCE, main
from csvqe.io import bundled, save


def run_json(capsys, *argv):
    code = main([*argv, "--json"])
    out = capsys.readouterr().out
    assert code == EXIT_OK
    return json.loads(out)


def test_decompose(capsys):
    r = run_json(capsys, "decompose", "bundled:example_3q")["results"]
    assert sorted(r["contextual_terms"]) == ["IIX", "IIY", "IIZ"]
    assert len(r["nc_terms"]) == 11 and r["generators"] == ["ZII"]


def test_ground(capsys):
    r = run_json(capsys, "ground", "bundled:example_3q")["results"]
    assert r["nc_energy"] == pytest.approx(-2.8915, abs=1e-4)
    assert r["exact_energy"] == pytest.approx(-3.9622, abs=1e-4)


def test_solve_defaults_to_smallest_register(capsys):
    r = run_json(capsys, "solve", "bundled:example_3q")["results"]
    assert r["quantum_qubits"] == 2 and r["retained"] == [0]
    assert r["energy"] == pytest.approx(-3.8942, abs=1e-4)


def test_solve_qubits_and_retain(capsys):
    full = run_json(capsys, "solve", "bundled:example_3q", "--qubits", "3")["results"]
    assert full["error"] == pytest.approx(0.0, abs=1e-9)
    kept = run_json(capsys, "solve", "bundled:example_3q", "--retain", "")["results"]
    assert kept["quantum_qubits"] == 3
    nc = run_json(capsys, "solve", "bundled:example_3q", "--no-correction")["results"]
    assert nc["energy"] == nc["nc_energy"]


@pytest.mark.parametrize("heuristic", ["greedy-pair", "optimal", "weight"])
def test_sweep(capsys, tmp_path, heuristic):
    path = tmp_path / "s.csv"
    r = run_json(capsys, "sweep", "bundled:h2_like", "--heuristic", heuristic, "--csv", str(path))["results"]
    energies = [rec["energy"] for rec in r["records"]]
    assert all(b <= a + 1e-9 for a, b in zip(energies, energies[1:]))
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["qubits", "energy", "error", "terms"]
    assert [float(row[1]) for row in rows[1:]] == energies


def test_sweep_text(capsys):
    assert main(["sweep", "bundled:example_3q"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "first within" in out


def test_random_bench(capsys, tmp_path):
    path = tmp_path / "h.csv"
    r = run_json(capsys, "random-bench", "--count", "30", "--bins", "4", "--csv", str(path))["results"]
    assert r["excluded"] == 0
    assert sum(r["histogram_nc"]["counts"]) == 30
    rows = list(csv.reader(path.open()))
    assert len(rows) == 1 + 2 * 4
    assert main(["random-bench", "--count", "5"]) == EXIT_OK
    assert "mean fractional error" in capsys.readouterr().out


def test_json_is_byte_identical_across_runs(capsys):
    outs = []
    for _ in range(2):
        main(["sweep", "bundled:example_3q", "--heuristic", "optimal", "--json"])
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    assert "wall_time" not in outs[0]
    main(["ground", "bundled:example_3q", "--json", "--timing"])
    assert "wall_time" in json.loads(capsys.readouterr().out)


def test_config_echo(capsys):
    cfg = run_json(capsys, "ground", "bundled:example_3q", "--seed", "7")["config"]
    assert cfg["seed"] == 7 and "func" not in cfg


def test_file_argument(capsys, tmp_path):
    path = tmp_path / "h.json"
    save(bundled("example_3q").hamiltonian, path)
    r = run_json(capsys, "ground", str(path))["results"]
    assert r["nc_energy"] == pytest.approx(-2.8915, abs=1e-4)


@pytest.mark.parametrize("argv, code", [
    (["ground", "/nonexistent/h.json"], EXIT_PARSE),
    (["ground", "bundled:missing"], EXIT_PARSE),
    (["solve", "bundled:example_3q", "--retain", "0,a"], EXIT_PARSE),
    (["solve", "bundled:example_3q", "--dense-limit", "1"], EXIT_RESOURCE),
    (["solve", "bundled:example_3q", "--qubits", "9"], EXIT_INVARIANT),
    (["solve", "bundled:example_3q", "--retain", "5"], EXIT_INVARIANT),
])
def test_exit_codes(capsys, argv, code):
    assert main(argv) == code
    assert capsys.readouterr().err


def test_malformed_file(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"n": 2, "terms": {"ZQ": 1.0}}')
    assert main(["decompose", str(path)]) == EXIT_PARSE
    assert "'ZQ'" in capsys.readouterr().err


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "csvqe.cli", "ground", "bundled:example_3q"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "nc_energy" in proc.stdout
