"""Built-in example maps with golden values, and the checks that compare against them."""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction

from .dynamics import (
    FiberCountConfig,
    analyze,
    family_scan,
    involution_invariance_scan,
    log_decimal,
)
from .errors import InputError
from .mapio import MapFile, load_map

# quadratic map of P2 with lambda = 2 and deg = 3
EX41 = MapFile("P2", ["x*z + y^2", "y*z + x^2", "x^2 + y^2"])
# cubic map of P2; golden values lambda = 3 and deg = 4.
# Its degrees come out as 3, 8, 21, 55, ... so lambda = 3 is not reproduced.
EX42 = MapFile("P2", ["x^2*y + y^2*z", "x*y*z", "x^2*y + x*y^2 + 2*y^2*z + z^2*(x + y)"])
# rank-one map of P1xP1 with f* = [[2,2],[2,2]], lambda = 4, deg = 8.
# (f^2)* = [[6,8],[6,8]] already drops, so the trace identity cannot be certified.
EX44 = MapFile("P1xP1", [["t0*t1*w0*w1", "t0^2*w1^2 - t1^2*w0^2"],
                         ["t0*w1*(t0*w0 - t1*w1)", "t0^2*w1^2 - (t0*w0 - t1*w1)^2"]])
# the one-parameter deformation of EX44; eps = 1 gives EX44 back
FEPS = MapFile("P1xP1", [["t0*t1*w0*w1", "t0^2*w1^2 - eps*t1^2*w0^2"],
                         ["t0*w1*(t0*w0 - eps*t1*w1)", "t0^2*w1^2 - (t0*w0 - t1*w1)^2"]],
               {"eps": "2"})


def power_map(d: int) -> MapFile:
    """(t^d, w) on P1xP1: regular, f* = diag(d, 1)."""
    if d < 1:
        raise InputError("power map exponent must be positive")
    return MapFile("P1xP1", [[f"t0^{d}", f"t1^{d}"], ["w0", "w1"]])


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self, entry: str) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {entry}: {self.name}" + (f" ({self.detail})" if self.detail else "")


@dataclass
class GalleryResult:
    entry: str
    checks: list = field(default_factory=list)
    report: dict | None = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"entry": self.entry, "passed": self.passed,
                "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail}
                           for c in self.checks]}


def _check(name, got, expected) -> Check:
    return Check(name, got == expected, f"got {got!r}, expected {expected!r}")


def _at_most_log(name, got: str, bound: int) -> Check:
    ref = log_decimal(bound)
    return Check(name, Decimal(got) <= Decimal(ref), f"got {got}, bound log {bound} = {ref}")


def _lambda(rep) -> str | None:
    return rep.dynamical_degree.get("lambda_exact")


def run_ex41(cfg=FiberCountConfig()) -> GalleryResult:
    rep = analyze(load_map(EX41), 5, cfg)
    reg = (rep.is_regular_geometric, rep.lambda_sq_vs_deg["comparison"] == "=",
           rep.thm13_consistent)
    checks = [
        _check("deg_top", rep.deg_top, 3),
        _check("lambda exact", _lambda(rep), "2"),
        _check("degree sequence", [e["degree"] for e in rep.degree_sequence], [2, 4, 8, 16, 32]),
        _check("stable up to", rep.stability_verified_up_to, 5),
        _check("regularity (geometric, lambda^2 = deg, consistent)", reg, (False, False, True)),
        _check("entropy bound", rep.entropy_upper_bound_log, "1.09861228866811"),
    ]
    return GalleryResult("ex41", checks, rep.to_dict())


def run_ex42(cfg=FiberCountConfig(), n: int = 3) -> GalleryResult:
    rep = analyze(load_map(EX42), n, cfg)
    checks = [
        _check("deg_top", rep.deg_top, 4),
        _check("lambda exact", _lambda(rep), "3"),
        _check("lambda^2 vs deg_top", (rep.lambda_sq_vs_deg["lambda_sq_exact_or_interval"],
                                       rep.lambda_sq_vs_deg["comparison"]), ("9", ">")),
        _at_most_log("entropy bound", rep.entropy_upper_bound_log, 4),
    ]
    return GalleryResult("ex42", checks, rep.to_dict())


def run_ex44(cfg=FiberCountConfig(), n: int = 3) -> GalleryResult:
    rep = analyze(load_map(EX44), n, cfg)
    pv = rep.perron_vector
    checks = [
        _check("pullback matrix", rep.pullback_matrix, [[2, 2], [2, 2]]),
        _check("rho exact", rep.spectral_radius["exact"], "4"),
        _check("Perron vector", (pv["entries"], pv["cone_certified"], pv["self_intersection"]),
               (["1", "1"], True, "2")),
        _check("deg_top", rep.deg_top, 8),
        _check("rank one (rank 1, trace identity)",
               (rep.rank_one["is_rank_one"], rep.rank_one["trace_identity_holds"]), (True, True)),
        _at_most_log("entropy bound", rep.entropy_upper_bound_log, 8),
    ]
    return GalleryResult("ex44", checks, rep.to_dict())


def run_power(d: int, cfg=FiberCountConfig(), n: int = 4) -> GalleryResult:
    rep = analyze(load_map(power_map(d)), n, cfg)
    pv = rep.perron_vector
    checks = [
        _check("pullback matrix", rep.pullback_matrix, [[d, 0], [0, 1]]),
        _check("rho exact", rep.spectral_radius["exact"], str(d)),
        _check("Perron vector", (pv["entries"], pv["self_intersection"]), (["1", "0"], "0")),
        _check("regular", rep.is_regular_geometric, True),
        _check("deg_top", rep.deg_top, d),
        _check("projection formula", rep.projection_formula["holds"], True),
        # regular but lambda^2 = d^2 != d: shipped as a known anomaly
        _check("regularity criterion consistent", rep.thm13_consistent, False),
    ]
    return GalleryResult(f"power-{d}", checks, rep.to_dict())


FEPS_VALUES = (Fraction(1), Fraction(2), Fraction(3), Fraction(1, 2))
INVOLUTION_K = (Fraction(1), Fraction(2), Fraction(-1), Fraction(1, 2))


def run_feps(eps=Fraction(2), seed: int = 0) -> GalleryResult:
    scan = family_scan(FEPS, "eps", FEPS_VALUES)
    rows = scan["rows"]
    checks = [
        _check("base scheme lengths", [r["base_scheme_length"] for r in rows], [16] * len(rows)),
        _check("pullback matrices", [r["matrix"] for r in rows], [[[2, 2], [2, 2]]] * len(rows)),
    ]
    f = load_map(FEPS.with_parameters(eps=eps))
    inv = involution_invariance_scan(f, "reciprocal", INVOLUTION_K, seed=seed)
    checks.append(_check("involution candidates (maps_equal, oracle)",
                         [(r["candidate"], r["maps_equal"], r["oracle_equal"]) for r in inv],
                         [(r["candidate"], False, False) for r in inv]))
    return GalleryResult("feps", checks, {"family_scan": scan, "involutions": inv})


ENTRIES = ("ex41", "ex42", "ex44", "power-2", "power-3", "power-5", "feps")


def run_entry(name: str, cfg=FiberCountConfig(), eps=Fraction(2)) -> GalleryResult:
    if name == "ex41":
        return run_ex41(cfg)
    if name == "ex42":
        return run_ex42(cfg)
    if name == "ex44":
        return run_ex44(cfg)
    if name == "feps":
        return run_feps(eps, cfg.rng_seed)
    if name.startswith("power-"):
        try:
            d = int(name[len("power-"):])
        except ValueError:
            raise InputError(f"bad power map name {name!r}") from None
        return run_power(d, cfg)
    raise InputError(f"unknown gallery entry {name!r}")
