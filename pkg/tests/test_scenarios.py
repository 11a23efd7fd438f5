import json

import numpy as np
import pytest

from hypdomain.caratheodory import SuiteTable
from hypdomain.cli import main
from hypdomain.domain import annulus_domain, save_domain
from hypdomain.exceptions import IoFailure, UnknownScenario
from hypdomain.report import emit_report, fmt, table_csv
from hypdomain.scenarios import (
    REGISTRY,
    Figure,
    RunReport,
    annulus_modulus,
    get_scenario,
    modulus_ratio,
    run_scenario,
)

EXPECTED = {"shrinking-annuli", "constant-annulus", "converging-annuli", "eccentric-annuli",
            "symmetric-3-connected", "figure2-pinch", "figure3-alternating"}


@pytest.fixture(scope="module")
def shrinking():
    return run_scenario("shrinking-annuli")


def test_registry():
    assert EXPECTED <= set(REGISTRY)
    for name, s in REGISTRY.items():
        assert s.name == name and s.horizon > 0 and s.expected
    with pytest.raises(UnknownScenario):
        get_scenario("no-such-thing")


def test_modulus_ratio():
    for m in range(2, 60):
        assert modulus_ratio(m) == 0.5
    assert annulus_modulus(0.25, 1.0) == pytest.approx(np.log(4) / (2 * np.pi))


def test_shrinking_scenario(shrinking):
    assert shrinking.passed
    assert shrinking.criterion("verdict").measured == "degenerate"
    assert shrinking.convergence[0].kernel.singleton
    with pytest.raises(KeyError):
        shrinking.criterion("missing")


def test_run_report_statuses():
    rep = RunReport("x", 3, 0)
    rep.add("a", True, 1.0, "<= 2")
    rep.add("b", None, float("nan"), "?")
    assert [c.status for c in rep.criteria] == ["pass", "inconclusive"]
    assert not rep.passed


def test_fmt():
    assert fmt(0.1) == "0.1" and fmt(1 / 3) == "0.333333333333"
    assert fmt(1 - 2j) == "1-2j" and fmt(True) == "true" and fmt(None) == ""
    assert fmt([1, 2.5]) == "1;2.5" and fmt(float("inf")) == "inf"
    assert table_csv(("a", "b"), [(1, "x,y")]) == 'a,b\n1,"x,y"\n'


def test_reports_are_bit_stable(tmp_path, shrinking):
    again = run_scenario("shrinking-annuli")
    for fmt_, name in (("text", "r.txt"), ("csv", "r.csv")):
        a = emit_report(shrinking, fmt_, tmp_path / "a" / name)
        b = emit_report(again, fmt_, tmp_path / "b" / name)
        assert [p.name for p in a] == [p.name for p in b]
        for pa, pb in zip(a, b):
            assert pa.read_bytes() == pb.read_bytes()
    text = (tmp_path / "a" / "r.txt").read_text()
    assert text.rstrip().endswith("(finite evidence up to m=50)")


def test_svg_and_table_output(tmp_path):
    dom = annulus_domain(0.25, 1.0)
    ring = 0.5 * np.exp(2j * np.pi * np.arange(64) / 64)
    from hypdomain.domain import ClosedCurve
    (p,) = emit_report(Figure("annulus", dom, [ClosedCurve(ring)]), "svg", tmp_path / "f.svg")
    svg = p.read_text()
    assert svg.startswith("<?xml") and 'class="meridian"' in svg and 'class="basepoint"' in svg
    t = SuiteTable("t", ("m", "v"), [(1, 0.5), (2, 0.25)])
    (p,) = emit_report(t, "csv", tmp_path / "t.csv")
    assert p.read_text() == "m,v\n1,0.5\n2,0.25\n"
    np.testing.assert_array_equal(t.column("v"), [0.5, 0.25])
    with pytest.raises(ValueError):
        emit_report(t, "pdf", tmp_path / "t.pdf")
    with pytest.raises(ValueError):
        emit_report([], "svg", tmp_path / "e.svg")
    (tmp_path / "file").write_text("")
    with pytest.raises(IoFailure):
        emit_report(t, "csv", tmp_path / "file" / "t.csv")


@pytest.fixture
def domain_file(tmp_path):
    p = tmp_path / "annulus.json"
    save_domain(annulus_domain(0.25, 1.0, basepoint=0.5), p)
    return p


def test_cli_metric(tmp_path, domain_file, capsys):
    assert main(["metric", "--domain", str(domain_file), "--resolution", "0.04", "--out", str(tmp_path / "o")]) == 0
    rows = (tmp_path / "o" / "density.csv").read_text().splitlines()
    assert len(rows) > 100
    assert "nodes=" in capsys.readouterr().out


def test_cli_map(tmp_path, domain_file):
    assert main(["map", "--domain", str(domain_file), "--truncation", "8", "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "map.json").read_text())
    assert data["lambdas"][0] == pytest.approx(np.log(4), abs=1e-10)


def test_cli_meridian(tmp_path, domain_file, capsys):
    assert main(["meridian", "--domain", str(domain_file), "--resolution", "0.02", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "meridians.svg").exists()
    assert capsys.readouterr().out.startswith("E={1},present,")


def test_cli_scenario_and_converge(tmp_path, capsys):
    assert main(["scenario", "shrinking-annuli", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "shrinking-annuli.txt").exists() and (tmp_path / "shrinking-annuli.csv").exists()
    assert main(["converge", "shrinking-annuli", "--horizon", "30", "--out", str(tmp_path)]) == 0
    assert "inconclusive up to m=30" in capsys.readouterr().out


def test_cli_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"components": [{"kind": "disc", "center": [0, 0], "radius": 0.5},
                                              {"kind": "outer_disc_complement", "center": [0, 0], "radius": 1}],
                               "basepoint": [0.1, 0]}))
    assert main(["metric", "--domain", str(bad), "--out", str(tmp_path)]) == 2
    assert "BasepointInComplement" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["scenario", "nope"])
