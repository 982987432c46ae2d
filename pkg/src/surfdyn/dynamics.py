"""Degree growth, topological degree and the invariants built from them."""

from __future__ import annotations

import random
from dataclasses import dataclass
from decimal import ROUND_CEILING, Context, Decimal
from fractions import Fraction

from .errors import GenericityError, InputError, PreconditionError, ResourceError
from .mapio import AnalysisReport, MapFile, load_map, parse_components
from .polycore import (
    SparsePoly,
    poly_gcd,
    poly_gcd_many,
    poly_linear_change,
    poly_resultant,
    poly_squarefree,
)
from .ratmap import (
    DEFAULT_DEGREE_BUDGET,
    MoebiusInvolution,
    RationalSelfMap,
    base_points_finite,
    base_scheme_length_p1xp1,
    is_regular,
    iterate,
    maps_equal,
    normalize,
    pullback_matrix,
    twist_by_involution,
)
from .spectral import (
    DEFAULT_TOLERANCE,
    PullbackMatrix,
    SpectralResult,
    analyze_matrix,
    decimal_string,
    interval_strings,
    rank_and_trace,
)
from .surface import builtin_lattice


# -- decimals -------------------------------------------------------------------

def nth_root_upper(s: int, n: int, digits: int = 15) -> Fraction:
    """A 15-digit decimal upper bound for s^(1/n), tight to one unit in the last place."""
    if s < 0 or n < 1:
        raise InputError("nth root needs s >= 0 and n >= 1")
    if s == 0:
        return Fraction(0)
    ctx = Context(prec=digits + 10)
    approx = ctx.exp(ctx.divide(ctx.ln(Decimal(s)), Decimal(n)))
    dec = Decimal(decimal_string(Fraction(approx), ROUND_CEILING, digits))
    cand = Fraction(dec)
    ulp = Fraction(Decimal(1).scaleb(dec.adjusted() - digits + 1))
    # repair the float-free approximation by exact comparison of nth powers
    while cand ** n < s:
        cand += ulp
    while cand > ulp and (cand - ulp) ** n >= s:
        cand -= ulp
    return cand


def nth_root_decimal(s: int, n: int) -> str:
    return decimal_string(nth_root_upper(s, n))


def log_decimal(q) -> str:
    """Natural log of a positive rational, 15 significant digits."""
    q = Fraction(q)
    if q <= 0:
        raise InputError("log of a non-positive number")
    ctx = Context(prec=40)
    val = ctx.ln(ctx.divide(Decimal(q.numerator), Decimal(q.denominator)))
    return decimal_string(Fraction(val))


# -- degree sequences -------------------------------------------------------------

@dataclass
class DegreeSequence:
    surface: str
    entries: list
    stable_up_to: int
    truncated: bool = False

    def s_values(self) -> list:
        """Intersection numbers H.(f^n)*H for each computed n."""
        lat = builtin_lattice(self.surface)
        H = lat.ample_ref
        out = []
        for _, m in self.entries:
            img = [sum(m[i][j] * H[j] for j in range(lat.rank)) for i in range(lat.rank)]
            out.append(int(lat.pair(H, img)))
        return out

    def to_list(self) -> list:
        if self.surface == "P2":
            return [{"n": n, "degree": m[0][0]} for n, m in self.entries]
        return [{"n": n, "matrix": [list(r) for r in m]} for n, m in self.entries]


def degree_sequence(f: RationalSelfMap, N: int,
                    budget: int = DEFAULT_DEGREE_BUDGET) -> DegreeSequence:
    if N < 1:
        raise InputError("sequence length must be positive")
    truncated = False
    try:
        maps = iterate(f, N, budget)
    except ResourceError as exc:
        maps, truncated = exc.partial, True
    entries = [(k + 1, pullback_matrix(g)) for k, g in enumerate(maps)]
    T = PullbackMatrix.for_surface(pullback_matrix(f), f.surface)
    stable = 0
    for n, m in entries:
        if [list(r) for r in T.power(n).entries] != [list(r) for r in m]:
            break
        stable = n
    return DegreeSequence(f.surface, entries, stable, truncated)


@dataclass
class DynamicalDegree:
    method: str
    lambda_exact: Fraction | None
    lo: Fraction | None
    hi: Fraction
    point_estimate: Fraction
    empirical_C: Fraction | None
    rho: SpectralResult

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "lambda_exact": str(self.lambda_exact) if self.lambda_exact is not None else None,
            "bracket": [decimal_string(self.lo) if self.lo is not None else None,
                        decimal_string(self.hi)],
            "point_estimate": decimal_string(self.point_estimate),
            "empirical_C": decimal_string(self.empirical_C) if self.empirical_C is not None else None,
        }


def dynamical_degree(f: RationalSelfMap, seq: DegreeSequence,
                     tolerance=DEFAULT_TOLERANCE) -> DynamicalDegree:
    T = PullbackMatrix.for_surface(pullback_matrix(f), f.surface)
    rho = analyze_matrix(T, tolerance)
    s = seq.s_values()
    N = len(s)
    point = nth_root_upper(s[-1], N)
    if rho.rho_exact is not None:
        r = rho.rho_exact
    else:
        r = rho.rho_interval[1]
    C = None
    if r > 0:
        C = max(max(Fraction(v) / r ** n, r ** n / Fraction(v))
                for n, v in enumerate(s, start=1))
    if seq.stable_up_to == N and not seq.truncated:
        lo, hi = rho.rho_interval
        return DynamicalDegree("spectral-stable", rho.rho_exact, lo, hi, point, C, rho)
    # Fekete: s_n is submultiplicative, so every s_n^(1/n) bounds lambda from above
    upper = min(nth_root_upper(v, n) for n, v in enumerate(s, start=1))
    return DynamicalDegree("sequence-only", None, None, upper, point, C, rho)


# -- topological degree -------------------------------------------------------------

@dataclass(frozen=True)
class FiberCountConfig:
    trials: int = 3
    rng_seed: int = 0
    height: int = 100
    attempts: int = 10

    def __post_init__(self):
        if self.trials < 3:
            raise InputError("at least 3 trials are required")
        if self.height < 0:
            raise InputError("height bound must be nonnegative")


def _rand_matrix(rng, k, h):
    return [[rng.randint(-h, h) for _ in range(k)] for _ in range(k)]


def _forms_meet(a: SparsePoly, b: SparsePoly) -> bool:
    """Whether two binary forms (other variables already specialized) share a zero."""
    if a.is_zero() or b.is_zero():
        return True
    return not poly_gcd(a, b).is_constant()


def _univariate_count(R: SparsePoly, B: SparsePoly, var) -> int:
    S = poly_squarefree(R, var)
    if B.is_zero():
        return S.degree(var)
    return S.degree(var) - poly_gcd(S, B).degree(var)


def _p2_trial(f: RationalSelfMap, rng, h):
    f0, f1, f2 = f.factors[0]
    d = f.degree
    M = _rand_matrix(rng, 3, h)
    try:
        g = [poly_linear_change(p, M) for p in (f0, f1, f2)]
    except InputError:
        return None
    a, b = rng.randint(-h, h), rng.randint(-h, h)
    F = g[0] - g[2].scale(a)
    G = g[1] - g[2].scale(b)
    if F.is_zero() or G.is_zero():
        return None
    # no solutions on the line z = 0
    if _forms_meet(F.specialize({"z": 0}), G.specialize({"z": 0})):
        return None
    Fa, Ga = F.specialize({"z": 1}), G.specialize({"z": 1})
    if Fa.degree("y") != d:
        return None
    R = poly_resultant(Fa, Ga, "y")
    if R.is_zero():
        return None
    gz = [p.specialize({"z": 1}) for p in g]
    pair = [poly_resultant(gz[i], gz[j], "y") for i, j in ((0, 1), (0, 2), (1, 2))]
    B = poly_gcd_many(pair)
    return _univariate_count(R, B, "x")


def _p1p1_trial(f: RationalSelfMap, rng, h):
    (p0, p1), (q0, q1) = f.factors
    S1, S2 = _rand_matrix(rng, 2, h), _rand_matrix(rng, 2, h)
    try:
        sheared = [poly_linear_change(poly_linear_change(p, S1, 0), S2, 1)
                   for p in (p0, p1, q0, q1)]
    except InputError:
        return None
    p0, p1, q0, q1 = sheared
    a, b = rng.randint(-h, h), rng.randint(-h, h)
    F = p0 - p1.scale(a)
    G = q0 - q1.scale(b)
    if F.is_zero() or G.is_zero():
        return None
    # nothing on the lines t1 = 0 and w1 = 0
    if _forms_meet(F.specialize({"t0": 1, "t1": 0}), G.specialize({"t0": 1, "t1": 0})):
        return None
    if _forms_meet(F.specialize({"w0": 1, "w1": 0}), G.specialize({"w0": 1, "w1": 0})):
        return None
    chart = {"t1": 1, "w1": 1}
    Fa, Ga = F.specialize(chart), G.specialize(chart)
    R = poly_resultant(Fa, Ga, "w0")
    if R.is_zero() or R.is_constant():
        return 0 if not R.is_zero() else None
    # points lying in the base loci of both factors solve every target
    B = poly_gcd(poly_resultant(p0.specialize(chart), p1.specialize(chart), "w0"),
                 poly_resultant(q0.specialize(chart), q1.specialize(chart), "w0"))
    return _univariate_count(R, B, "t0")


def topological_degree(f: RationalSelfMap, cfg: FiberCountConfig = FiberCountConfig()) -> int:
    """Number of preimages of a generic point, by unanimous randomized fiber counts."""
    if not base_points_finite(f):
        raise PreconditionError("base locus is not finite")
    trial_fn = _p2_trial if f.surface == "P2" else _p1p1_trial
    counts = []
    for t in range(cfg.trials):
        rng = random.Random(cfg.rng_seed * 1000003 + t)
        for _ in range(cfg.attempts):
            c = trial_fn(f, rng, cfg.height)
            if c is not None:
                counts.append(c)
                break
        else:
            raise GenericityError(
                f"trial {t} found no general position in {cfg.attempts} attempts")
    if len(set(counts)) != 1:
        raise GenericityError(f"fiber counts disagree across trials: {counts}")
    return counts[0]


# -- comparisons and reports ----------------------------------------------------------

def _lambda_bounds(dd: DynamicalDegree):
    if dd.lambda_exact is not None:
        return dd.lambda_exact, dd.lambda_exact
    return dd.lo, dd.hi


def log_concavity_check(dd: DynamicalDegree, deg_top: int) -> dict:
    """Compare lambda^2 with the topological degree, exactly or by interval."""
    lo, hi = _lambda_bounds(dd)
    if dd.lambda_exact is not None:
        sq = dd.lambda_exact ** 2
        comp = ">" if sq > deg_top else "=" if sq == deg_top else "<"
        shown = str(sq)
    else:
        shown = [decimal_string(lo ** 2) if lo is not None else None,
                 decimal_string(hi ** 2)]
        if hi ** 2 < deg_top:
            comp = "<"
        elif lo is not None and lo ** 2 > deg_top:
            comp = ">"
        else:
            comp = "indeterminate"
    return {"lambda_sq_exact_or_interval": shown, "deg_top": deg_top, "comparison": comp}


def regularity_report(f: RationalSelfMap, dd: DynamicalDegree, deg_top: int) -> dict:
    geometric = is_regular(f)
    lo, hi = _lambda_bounds(dd)
    if dd.lambda_exact is not None:
        numeric = dd.lambda_exact ** 2 == deg_top
    elif hi ** 2 < deg_top or (lo is not None and lo ** 2 > deg_top):
        numeric = False
    else:
        numeric = None
    consistent = None if numeric is None else geometric == numeric
    return {"is_regular_geometric": geometric, "lambda_sq_equals_deg": numeric,
            "thm13_consistent": consistent}


def entropy_bound(dd: DynamicalDegree, deg_top: int) -> str:
    """max(log lambda, log deg) from the upper end of the lambda bracket."""
    _, hi = _lambda_bounds(dd)
    return log_decimal(max(Fraction(hi), Fraction(deg_top), Fraction(1)))


def rank_one_report(T: PullbackMatrix, dd: DynamicalDegree) -> dict:
    rank, trace = rank_and_trace(T)
    holds = None
    if rank == 1 and dd.lambda_exact is not None:
        holds = dd.lambda_exact == trace
    rho = dd.rho.rho_exact
    return {"is_rank_one": rank == 1, "trace_identity_holds": holds,
            "rho_equals_trace": (rho == trace) if rank == 1 and rho is not None else None}


def projection_formula(f: RationalSelfMap, deg_top: int) -> dict:
    """(f*H . f*H) against deg_top * (H . H)."""
    lat = builtin_lattice(f.surface)
    T = PullbackMatrix(pullback_matrix(f), lat)
    fH = T.apply(lat.ample_ref)
    lhs = lat.pair(fH, fH)
    rhs = deg_top * lat.pair(lat.ample_ref, lat.ample_ref)
    return {"lhs": str(lhs), "rhs": str(rhs), "holds": lhs == rhs}


def analyze(f, n: int = 5, cfg: FiberCountConfig = FiberCountConfig(),
            tolerance=DEFAULT_TOLERANCE, budget: int = DEFAULT_DEGREE_BUDGET) -> AnalysisReport:
    """Every invariant of one map, collected into a report."""
    if not isinstance(f, RationalSelfMap):
        f = load_map(f)
    lat = builtin_lattice(f.surface)
    m = pullback_matrix(f)
    T = PullbackMatrix(m, lat)
    seq = degree_sequence(f, n, budget)
    dd = dynamical_degree(f, seq, tolerance)
    rho = dd.rho
    deg_top = topological_degree(f, cfg)
    lsq = log_concavity_check(dd, deg_top)
    reg = regularity_report(f, dd, deg_top)
    rank, trace = rank_and_trace(T)
    anomalies = []
    if lsq["comparison"] == "<":
        anomalies.append("lambda^2 < deg_top: non-surjective input or internal error")
    if reg["thm13_consistent"] is False:
        anomalies.append("regularity and lambda^2 = deg_top disagree")
    if seq.stable_up_to < len(seq.entries):
        anomalies.append(f"degree sequence leaves the matrix powers after n = {seq.stable_up_to}")
    radius = {"exact": str(rho.rho_exact) if rho.rho_exact is not None else None,
              "interval": interval_strings(*rho.rho_interval)}
    if rho.rho_exact is not None:
        entries = [str(c) for c in rho.perron_vector]
        v2 = str(lat.pair(rho.perron_vector, rho.perron_vector))
    else:
        entries = [interval_strings(a, b) for a, b in rho.perron_vector]
        v2 = None
    perron = {"entries": entries, "cone_certified": rho.cone_certified,
              "indeterminate": rho.indeterminate, "self_intersection": v2}
    return AnalysisReport(
        surface=f.surface,
        algebraic_degree=f.degree if f.surface == "P2" else None,
        bidegree_matrix=None if f.surface == "P2" else [list(r) for r in m],
        pullback_matrix=[list(r) for r in m],
        char_poly=list(rho.char_poly),
        spectral_radius=radius,
        perron_vector=perron,
        deg_top=deg_top,
        lambda_sq_vs_deg=lsq,
        is_regular_geometric=reg["is_regular_geometric"],
        thm13_consistent=reg["thm13_consistent"],
        rank_f_star=rank,
        trace_f_star=trace,
        entropy_upper_bound_log=entropy_bound(dd, deg_top),
        degree_sequence=seq.to_list(),
        stability_verified_up_to=seq.stable_up_to,
        dynamical_degree=dd.to_dict(),
        rank_one=rank_one_report(T, dd),
        projection_formula=projection_formula(f, deg_top),
        truncated=seq.truncated,
        anomalies=anomalies,
    )


# -- families and involutions ------------------------------------------------------------

def family_scan(mf: MapFile, param: str, values, with_deg_top: bool = False,
                cfg: FiberCountConfig = FiberCountConfig()) -> dict:
    """Base scheme length and pullback matrix along a one-parameter family."""
    if mf.surface != "P1xP1":
        raise PreconditionError("family scans are defined for P1xP1 maps")
    values = list(values)
    if not values:
        raise InputError("empty list of parameter values")
    rows = []
    for v in values:
        inst = mf.with_parameters(**{param: v})
        raw = parse_components(inst)
        degenerate = any(not poly_gcd_many(list(fac)).is_constant() for fac in raw)
        f = normalize(inst.surface, raw)
        row = {"value": str(v), "degenerate": degenerate,
               "base_scheme_length": base_scheme_length_p1xp1(f),
               "matrix": [list(r) for r in pullback_matrix(f)]}
        if with_deg_top:
            row["deg_top"] = topological_degree(f, cfg)
        rows.append(row)
    good = [r for r in rows if not r["degenerate"]]
    return {
        "rows": rows,
        "length_constant": len({r["base_scheme_length"] for r in good}) <= 1,
        "matrix_constant": len({str(r["matrix"]) for r in good}) <= 1,
    }


def _proportional(u, v) -> bool:
    return all(u[i] * v[j] == u[j] * v[i] for i in range(len(u)) for j in range(i + 1, len(u)))


def _oracle_equal(f: RationalSelfMap, g: RationalSelfMap, points: int, rng) -> bool | None:
    """Evaluate both maps at random rational points off their base loci."""
    agree = 0
    for _ in range(50 * points):
        pt = [Fraction(rng.randint(-50, 50), rng.randint(1, 50)) for _ in f.variables]
        fv, gv = f.evaluate(pt), g.evaluate(pt)
        if any(all(c == 0 for c in fac) for fac in fv + gv):
            continue
        if not all(_proportional(a, b) for a, b in zip(fv, gv)):
            return False
        agree += 1
        if agree == points:
            return True
    return None


def involution_invariance_scan(f: RationalSelfMap, family: str, values,
                               epsilon=None, points: int = 5, seed: int = 0) -> list:
    """Rows of ``maps_equal(f o iota, f)`` for candidate involutions, plus the identity swap."""
    if f.surface != "P1xP1":
        raise PreconditionError("involution scans are defined for P1xP1 maps")
    if family not in ("reciprocal", "scaling"):
        raise InputError(f"unknown involution family {family!r}")
    values = [Fraction(v) for v in values]
    if not values:
        raise InputError("empty list of parameter values")
    cands = [("identity-swap", None, MoebiusInvolution(((1, 0), (0, 1))))]
    for v in values:
        label = f"K={v}" if family == "reciprocal" else f"L={v}"
        try:
            iota = (MoebiusInvolution.reciprocal(v) if family == "reciprocal"
                    else MoebiusInvolution.scaling(v))
        except InputError:
            cands.append((label, v, None))
            continue
        cands.append((label, v, iota))
    rows = []
    for k, (label, v, iota) in enumerate(cands):
        row = {"candidate": label}
        if iota is None:
            row.update(maps_equal=None, oracle_equal=None, note="singular candidate skipped")
            rows.append(row)
            continue
        twisted = twist_by_involution(f, iota)
        row["maps_equal"] = maps_equal(twisted, f)
        row["oracle_equal"] = _oracle_equal(twisted, f, points, random.Random(seed * 1009 + k))
        if family == "scaling" and v is not None and epsilon is not None:
            row["obstruction"] = str(v * v + Fraction(epsilon))
        rows.append(row)
    return rows
