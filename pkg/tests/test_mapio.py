import json
from fractions import Fraction

import pytest

from helpers import XYZ
from surfdyn.errors import InputError, ParseError
from surfdyn.mapio import (
    AnalysisReport,
    MapFile,
    emit_report,
    load_map,
    parse_components,
    parse_expression,
    parse_rational,
    read_report,
)


def test_precedence_and_unary_minus():
    x = parse_expression("x", XYZ)
    assert parse_expression("-x^2", XYZ) == -(x * x)
    assert parse_expression("2*x^2 - 3*x + 1", XYZ) == 2 * x * x - 3 * x + 1
    assert parse_expression("(x + 1)^2", XYZ) == x * x + 2 * x + 1
    assert parse_expression("1/2*x", XYZ) == x.scale(Fraction(1, 2))
    assert parse_expression("--x", XYZ) == x


def test_parameters_substituted():
    p = parse_expression("eps*x", XYZ, {"eps": "3/2"})
    assert p == parse_expression("3/2*x", XYZ)
    with pytest.raises(InputError):
        parse_expression("x", XYZ, {"x": 1})


@pytest.mark.parametrize("text, pos", [
    ("x +", 3),
    ("x $ y", 2),
    ("x^y", 2),
    ("1/0", 2),
    ("foo + x", 0),
    ("(x + y", 6),
    ("x y", 2),
    ("x²", 1),
])
def test_parse_errors_carry_position(text, pos):
    with pytest.raises(ParseError) as err:
        parse_expression(text, XYZ)
    assert err.value.position == pos
    assert f"position {pos}" in str(err.value)


def test_parse_rational():
    assert parse_rational("-3/4") == Fraction(-3, 4)
    assert parse_rational(" 5 ") == 5
    with pytest.raises(InputError):
        parse_rational("1/0")
    with pytest.raises(InputError):
        parse_rational("abc")


def test_mapfile_validation():
    ok = {"surface": "P2", "components": ["x", "y", "z"]}
    MapFile.from_dict(ok)
    for bad in [
        {"surface": "P3", "components": ["x", "y", "z"]},
        {"surface": "P2", "components": ["x", "y"]},
        {"surface": "P1xP1", "components": ["t0", "t1"]},
        {"surface": "P2", "components": ["x", "y", "z"], "extra": 1},
        [1, 2],
    ]:
        with pytest.raises(InputError):
            MapFile.from_dict(bad)
    with pytest.raises(ParseError):
        MapFile.from_json("{not json")


def test_component_checks():
    with pytest.raises(InputError, match="not homogeneous"):
        parse_components(MapFile("P2", ["x^2 + y", "y", "z"]))
    with pytest.raises(InputError, match="different degrees"):
        parse_components(MapFile("P2", ["x^2", "y", "z"]))
    with pytest.raises(InputError, match="identically zero"):
        parse_components(MapFile("P2", ["x - x", "y", "z"]))
    with pytest.raises(InputError, match="bihomogeneous"):
        parse_components(MapFile("P1xP1", [["t0 + w0", "t1"], ["w0", "w1"]]))
    with pytest.raises(InputError, match="different bidegrees"):
        parse_components(MapFile("P1xP1", [["t0", "t1*w0"], ["w0", "w1"]]))


def test_load_map_normalizes(tmp_path):
    path = tmp_path / "m.json"
    path.write_text(json.dumps({"surface": "P2", "components": ["2*x*y", "2*y*z", "4*y^2"]}))
    f = load_map(path)
    assert f.degree == 1
    assert [p.render() for p in f.factors[0]] == ["x", "z", "2*y"]


def _report():
    return AnalysisReport(
        surface="P2", algebraic_degree=2, bidegree_matrix=None, pullback_matrix=[[2]],
        char_poly=[-2, 1], spectral_radius={"exact": "2", "interval": ["2", "2"]},
        perron_vector={"entries": ["1"], "cone_certified": True}, deg_top=3,
        lambda_sq_vs_deg={"lambda_sq_exact_or_interval": "4", "deg_top": 3, "comparison": ">"},
        is_regular_geometric=False, thm13_consistent=True, rank_f_star=1, trace_f_star=2,
        entropy_upper_bound_log="1.09861228866811",
        degree_sequence=[{"n": 1, "degree": 2}, {"n": 2, "degree": 4}],
        stability_verified_up_to=2)


def test_report_roundtrip_and_formats():
    rep = _report()
    data = emit_report(rep, "json")
    assert read_report(data) == rep
    table = emit_report(rep, "table").decode("ascii")
    assert "deg_top" in table and "null" in table
    csv_text = emit_report(rep, "csv").decode("ascii")
    assert csv_text.splitlines() == [
        "n,d11,d12,d21,d22,lambda_upper_n",
        "1,2,,,,2.00000000000000",
        "2,4,,,,2.00000000000000",
    ]
    with pytest.raises(InputError):
        emit_report(rep, "xml")
