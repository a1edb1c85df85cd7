import json
import math

import pytest

from diracphase.config import ConfigError, format_complex, load, parse_text, resolve
from diracphase.report import (ReportBundle, Table, Verdict, emit_report, render_csv,
                               render_json)

SAMPLE = """
# comment line
experiment = zeta_oracle
grid.nmax = 12     # trailing comment
pot.A0.2 = 0.5,0.25
holonomy.h = 0.04, 0.02, 0.01
"""


def test_parse_text_types():
    vals = parse_text(SAMPLE)
    assert vals["grid.nmax"] == 12
    assert vals["pot.A0.2"] == 0.5 + 0.25j
    assert vals["holonomy.h"] == (0.04, 0.02, 0.01)


@pytest.mark.parametrize("text,line", [("grid.nmax = 3\nbogus.key = 1", 2),
                                       ("grid.nmax = three", 1),
                                       ("\n\njust words", 3),
                                       ("pot.A0.x = 1", 1)])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ConfigError, match=f"line {line}"):
        parse_text(text)


def test_resolve_fills_defaults():
    cfg = resolve({})
    assert cfg["grid.nmax"] == 24 and cfg["grid.boundary"] == "antiperiodic"
    assert cfg.family("pot.A1") == {1: -0.4j, 3: -0.15j}
    assert cfg.t_end == cfg["pot.T"]
    custom = resolve({"pot.A0.1": "1,0"})
    assert custom.family("pot.A0") == {1: 1 + 0j} and custom.family("pot.A1") == {}
    with pytest.raises(ConfigError):
        resolve({"grid.boundary": "twisted"})


def test_load_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load(tmp_path / "nope.cfg")


def test_format_complex():
    assert format_complex(1.5 - 0.25j) == "1.5-0.25j"
    assert format_complex(complex(0.1, 0.0)) == "0.1+0.0j"
    assert complex(format_complex(0.1 + 1e-300j)) == 0.1 + 1e-300j


def bundle(rows=()):
    t = Table(["a", "b"])
    for r in rows:
        t.add(*r)
    return ReportBundle("demo", resolve({}).echo(), t,
                        {"ok": Verdict(True, 0.5, 1.0), "bad": Verdict(False, 2 + 1j, None)})


def test_empty_bundle_csv_is_header_only():
    assert render_csv(bundle()) == "a,b\n"


def test_csv_cells():
    text = render_csv(bundle([(0.1, 1 - 2j), (math.inf, "x")]))
    assert text.splitlines() == ["a,b", "0.1,1.0-2.0j", "inf,x"]
    with pytest.raises(ValueError):
        Table(["a"]).add(1, 2)


def test_json_round_trip():
    b = bundle([(0.1, 1 - 2j)])
    data = json.loads(render_json(b))
    assert data == b.to_jsonable()
    assert set(data) == {"experiment", "config_echo", "tables", "verdicts", "versions"}
    assert data["verdicts"]["bad"] == {"pass": False, "value": "2.0+1.0j", "threshold": None}
    assert data["config_echo"]["grid.nmax"] == 24
    assert not b.passed


def test_emit_report_writes_and_reports_path(tmp_path):
    out = tmp_path / "r.csv"
    text = emit_report(bundle([(1, 2)]), "csv", out)
    assert out.read_text() == text
    with pytest.raises(OSError, match="cannot write"):
        emit_report(bundle(), "csv", tmp_path / "missing" / "r.csv")
    with pytest.raises(ValueError):
        emit_report(bundle(), "xml")
