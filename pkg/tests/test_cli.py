import json
import re

import pytest

from darkmap import cli
from darkmap.errors import ConvergenceFailure
from darkmap.report import emit, parse, reports_equal
from darkmap.pipeline import run
from darkmap.system_model import parse_system


def invoke(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_lambda(capsys, fixtures_dir):
    code, out, _ = invoke(capsys, "analyze", fixtures_dir / "lambda.json", "--upper", "3")
    assert code == 0
    doc = json.loads(out)
    assert doc["total_dark"] == 1
    assert doc["n_upper"] == 1 and doc["n_lower"] == 2
    block = doc["blocks"][0]
    assert {"omega", "dim", "rank", "singular_values", "dark_states_dressed", "dark_states_bare"} <= set(block)


def test_analyze_lab_document_needs_partition(capsys, fixtures_dir):
    code, _, err = invoke(capsys, "analyze", fixtures_dir / "lambda_lab.json")
    assert code == 2
    assert json.loads(err)["exit_code"] == 2
    code, out, _ = invoke(capsys, "analyze", fixtures_dir / "lambda_lab.json", "--upper", "3")
    assert code == 0 and json.loads(out)["total_dark"] == 1


def test_all_levels_upper_is_rejected(capsys, fixtures_dir):
    code, _, err = invoke(capsys, "analyze", fixtures_dir / "lambda.json", "--upper", "1,2,3")
    assert code == 2
    assert json.loads(err.strip().splitlines()[-1])["error"] == "LowerTooSmall"


def test_upper_flag_overrides_document(capsys, fixtures_dir):
    code, out, err = invoke(capsys, "analyze", fixtures_dir / "five2.json", "--upper", "5")
    assert code == 0
    assert json.loads(out)["n_upper"] == 1
    assert "overrides" in err


def test_shared_edge_chain(capsys, fixtures_dir):
    code, out, _ = invoke(capsys, "analyze", fixtures_dir / "nchain8.json")
    assert code == 0 and json.loads(out)["total_dark"] == 0


def test_report_round_trip_and_determinism(capsys, fixtures_dir, tmp_path):
    path = tmp_path / "r.json"
    code, out, _ = invoke(capsys, "analyze", fixtures_dir / "five2.json", "--report", path)
    assert code == 0 and out == ""
    text = path.read_text()
    invoke(capsys, "analyze", fixtures_dir / "five2.json", "--report", tmp_path / "s.json")
    assert (tmp_path / "s.json").read_text() == text
    report = run(parse_system((fixtures_dir / "five2.json").read_text())).report
    assert reports_equal(parse(emit(report)), report)
    assert reports_equal(parse(text), report)


@pytest.mark.parametrize("name", ["lambda.json", "nchain8.json", "zero_coupling.json"])
def test_round_trip_fixtures(fixtures_dir, name):
    report = run(parse_system((fixtures_dir / name).read_text())).report
    assert reports_equal(parse(emit(report)), report)
    assert emit(parse(emit(report))) == emit(report)


def dot_edges(text):
    return re.findall(r"(U\d+) -- (L\d+)", text)


def dot_nodes(text):
    return dict(re.findall(r'(\w\d+) \[shape=\w+, label="\w\d+\\n([^"]+)"\]', text))


def test_export_dot_lambda(capsys, fixtures_dir):
    code, out, _ = invoke(capsys, "export-dot", fixtures_dir / "lambda.json")
    assert code == 0
    nodes = dot_nodes(out)
    assert sorted(nodes) == ["L1", "L2", "U1"]
    a = run(parse_system((fixtures_dir / "lambda.json").read_text()))
    cut = a.report.tolerances.tol_rank * a.report.sigma_max
    expected = [(f"U{i + 1}", f"L{k + 1}") for i in range(1) for k in range(2)
                if abs(a.dressed.coupling[i, k]) > cut]
    assert dot_edges(out) == expected


def test_export_dot_zero_coupling(capsys, fixtures_dir):
    code, out, _ = invoke(capsys, "export-dot", fixtures_dir / "zero_coupling.json")
    assert code == 0
    assert dot_edges(out) == []
    assert len(dot_nodes(out)) == 4


def test_export_dot_five_level(capsys, fixtures_dir):
    code, out, _ = invoke(capsys, "export-dot", fixtures_dir / "five2.json")
    assert code == 0
    nodes = dot_nodes(out)
    assert sorted(n for n in nodes if n[0] == "U") == ["U1", "U2"]
    assert sorted(n for n in nodes if n[0] == "L") == ["L1", "L2", "L3"]
    # Omega35 + Omega25 + Omega15 = 0 removes the edge between |5> and the symmetric state
    top = next(n for n in ("U1", "U2") if float(nodes[n]) == 0.0)
    sym = next(n for n in ("L1", "L2", "L3") if float(nodes[n]) == pytest.approx(0.8))
    edges = dot_edges(out)
    assert (top, sym) not in edges
    assert len(edges) == 5


def test_verify_lambda_passes(capsys, fixtures_dir):
    code, out, _ = invoke(capsys, "verify", fixtures_dir / "lambda.json")
    assert code == 0
    assert json.loads(out)["verify"]["pass"] is True


def test_verify_fails_when_blocks_are_merged(capsys, fixtures_dir):
    code, out, err = invoke(capsys, "verify", fixtures_dir / "lambda_offresonant.json", "--tol-degeneracy", "1.0")
    assert code == 1
    section = json.loads(out)["verify"]
    assert section["pass"] is False
    assert max(section["max_leakage"]) > 1e-6
    assert "verification failed" in err


def test_verify_catalog_lambda_chain(capsys):
    code, out, _ = invoke(capsys, "verify", "--catalog", "lambda_chain", "--param", "N=7", "--seed", "3")
    assert code == 0
    assert json.loads(out)["total_dark"] == 1


def test_catalog_list(capsys):
    code, out, _ = invoke(capsys, "catalog", "list")
    assert code == 0
    names = [line.split()[0] for line in out.splitlines()]
    assert "lambda_chain" in names and "dsp" in names


@pytest.mark.parametrize(
    "argv",
    [
        ["lambda"],
        ["four_level_2"],
        ["five-level-2"],
        ["multipod", "N=8", "degenerate=5"],
        ["v_chain", "N=9"],
        ["dsp", "n=4", "theta=0.6", "--large-n"],
        ["dsp", "n=3", "g=0.2", "N_atoms=6", "Omega=1.0"],
    ],
)
def test_catalog_run(capsys, argv):
    code, out, _ = invoke(capsys, "catalog", "run", *argv, "--seed", "2", "--verify")
    assert code == 0, out
    doc = json.loads(out)
    assert doc["catalog"]["pass"] is True
    assert doc["verify"]["pass"] is True


def test_catalog_run_reports_failed_expectation(capsys):
    # analyzing the lambda entry against the wrong partition breaks the expectation
    code, out, err = invoke(capsys, "catalog", "run", "lambda", "--upper", "1")
    assert code == 1
    assert json.loads(out)["catalog"]["pass"] is False


def test_tolerance_sources(monkeypatch, capsys, fixtures_dir):
    monkeypatch.setenv(cli.TOL_RANK_ENV, "1e-6")
    _, out, _ = invoke(capsys, "analyze", fixtures_dir / "lambda.json")
    assert json.loads(out)["tolerances"]["tol_rank"] == 1e-6
    _, out, _ = invoke(capsys, "analyze", fixtures_dir / "lambda.json", "--tol-rank", "1e-7")
    assert json.loads(out)["tolerances"]["tol_rank"] == 1e-7
    monkeypatch.setenv(cli.TOL_RANK_ENV, "abc")
    code, _, _ = invoke(capsys, "analyze", fixtures_dir / "lambda.json")
    assert code == 2


@pytest.mark.parametrize(
    "argv, code",
    [
        (["analyze", "/nonexistent/file.json"], 4),
        (["analyze"], 2),
        (["analyze", "x.json", "--catalog", "lambda"], 2),
        (["catalog", "run", "nope"], 2),
        (["catalog", "run", "vee", "O23=1"], 2),
        (["analyze", "--catalog", "lambda_chain", "--param", "N=4"], 2),
        (["bogus"], 2),
    ],
)
def test_error_exit_codes(capsys, argv, code):
    got, _, err = invoke(capsys, *argv)
    assert got == code
    if argv != ["bogus"]:
        assert json.loads(err.strip().splitlines()[-1])["exit_code"] == code


def test_unwritable_report(capsys, fixtures_dir, tmp_path):
    code, _, err = invoke(capsys, "analyze", fixtures_dir / "lambda.json", "--report", tmp_path / "no" / "r.json")
    assert code == 4


def test_schema_error_from_stdin(capsys, monkeypatch):
    import io

    monkeypatch.setattr("sys.stdin", io.StringIO("{"))
    code, _, err = invoke(capsys, "analyze", "-")
    assert code == 2
    assert json.loads(err)["error"] == "SchemaError"


@pytest.mark.parametrize("exc, code", [(ConvergenceFailure("x"), 3), (RuntimeError("boom"), 3)])
def test_unexpected_failures_map_to_exit_codes(monkeypatch, capsys, fixtures_dir, exc, code):
    def broken(*_a, **_k):
        raise exc

    monkeypatch.setattr(cli, "run", broken)
    got, _, err = invoke(capsys, "analyze", fixtures_dir / "lambda.json")
    assert got == code
    assert json.loads(err)["exit_code"] == code
