from fractions import Fraction

import pytest

from helpers import rand_p1p1_map, rand_p2_map, seeded
from surfdyn import gallery
from surfdyn.dynamics import (
    FiberCountConfig,
    analyze,
    degree_sequence,
    dynamical_degree,
    family_scan,
    involution_invariance_scan,
    log_decimal,
    nth_root_decimal,
    nth_root_upper,
    topological_degree,
)
from surfdyn.errors import GenericityError, InputError
from surfdyn.mapio import MapFile, load_map
from surfdyn.ratmap import identity_map


def test_nth_root_upper_is_tight():
    for s, n in [(2, 1), (8, 3), (10, 2), (28, 3), (356, 4), (7, 5)]:
        r = nth_root_upper(s, n)
        ulp = Fraction(1, 10**14) if r < 10 else Fraction(1, 10**13)
        assert r ** n >= s
        assert (r - ulp) ** n < s
    assert nth_root_decimal(8, 3) == "2.00000000000000"
    with pytest.raises(InputError):
        nth_root_upper(5, 0)


def test_log_decimal():
    assert log_decimal(3) == "1.09861228866811"
    assert log_decimal(1) == "0.00000000000000" or Fraction(log_decimal(1)) == 0
    with pytest.raises(InputError):
        log_decimal(0)


@pytest.mark.parametrize("name,expected", [("ex41", 3), ("ex42", 4), ("ex44", 8)])
def test_topological_degrees(name, expected, request):
    assert topological_degree(request.getfixturevalue(name)) == expected


@pytest.mark.parametrize("d", [1, 2, 3, 5])
def test_power_map_degree(d):
    assert topological_degree(load_map(gallery.power_map(d))) == d


def test_identity_map():
    for surface in ("P2", "P1xP1"):
        f = identity_map(surface)
        assert topological_degree(f) == 1
        seq = degree_sequence(f, 4)
        assert seq.s_values() == [seq.s_values()[0]] * 4
        assert seq.stable_up_to == 4


def test_seed_regression(ex42):
    counts = {topological_degree(ex42, FiberCountConfig(rng_seed=s)) for s in range(5)}
    assert counts == {4}


def test_genericity_failure(ex41):
    with pytest.raises(GenericityError):
        topological_degree(ex41, FiberCountConfig(height=0))
    with pytest.raises(InputError):
        FiberCountConfig(trials=2)


def test_sequence_and_degree_ex41(ex41):
    seq = degree_sequence(ex41, 4)
    assert seq.s_values() == [2, 4, 8, 16]
    dd = dynamical_degree(ex41, seq)
    assert dd.method == "spectral-stable" and dd.lambda_exact == 2


def test_unstable_sequence_ex42(ex42):
    seq = degree_sequence(ex42, 3)
    assert seq.s_values() == [3, 8, 21]
    assert seq.stable_up_to == 1
    dd = dynamical_degree(ex42, seq)
    assert dd.method == "sequence-only" and dd.lambda_exact is None
    # Fekete: every s_n^(1/n) bounds lambda from above
    assert dd.hi <= nth_root_upper(21, 3)


def test_truncation_gives_partial_report(ex41):
    rep = analyze(ex41, 6, budget=20)
    assert rep.truncated
    assert [e["degree"] for e in rep.degree_sequence] == [2, 4, 8, 16]


def test_report_fields(ex41):
    rep = analyze(ex41, 3)
    assert rep.deg_top == 3
    assert rep.lambda_sq_vs_deg["comparison"] == ">"
    assert rep.entropy_upper_bound_log == log_decimal(3)
    assert rep.projection_formula == {"lhs": "4", "rhs": "3", "holds": False}


def test_family_scan_flags_degenerate_value():
    mf = MapFile.read("maps/feps.json")
    scan = family_scan(mf, "eps", [Fraction(0), Fraction(1)])
    zero, one = scan["rows"]
    assert zero["degenerate"] and not one["degenerate"]
    assert one["base_scheme_length"] == 16
    with pytest.raises(InputError):
        family_scan(mf, "eps", [])


def test_involution_rows():
    f = load_map(gallery.FEPS)
    rows = involution_invariance_scan(f, "reciprocal", [1, 0, 2])
    assert [r["candidate"] for r in rows] == ["identity-swap", "K=1", "K=0", "K=2"]
    assert rows[2]["maps_equal"] is None
    scaled = involution_invariance_scan(f, "scaling", [3], epsilon=2)
    assert scaled[1]["obstruction"] == "11"
    # a map that really is invariant under the swap
    sym = load_map(MapFile("P1xP1", [["w0", "w1"], ["t0", "t1"]]))
    rows = involution_invariance_scan(sym, "reciprocal", [1])
    assert rows[0]["maps_equal"] is False  # swap of a swap is the identity, not sym
    assert rows[0]["oracle_equal"] is False


def test_lambda_squared_bounds_degree_on_random_maps():
    rng = seeded(2024)
    decided = 0
    for k in range(100):
        f = rand_p2_map(rng, 2) if k % 2 else rand_p1p1_map(rng)
        rep = analyze(f, 3)
        comp = rep.lambda_sq_vs_deg["comparison"]
        assert comp != "<", rep.to_dict()
        decided += comp in (">", "=")
    assert decided >= 80
