"""Rational self-maps of P^2 and P^1 x P^1.

A map is stored as a tuple of factors: one triple ``(f0, f1, f2)`` of forms
of a common degree for P^2, and two pairs ``(p0, p1), (q0, q1)`` of
bihomogeneous forms in ``(t0, t1 | w0, w1)`` for P^1 x P^1.  Every map that
leaves this module is normalized: the gcd of each factor is cancelled and
the factor is scaled to coprime integer coefficients with a positive
leading coefficient on its first nonzero component.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import gcd, lcm

from .errors import DegenerateCompositionError, InputError, PreconditionError, ResourceError
from .polycore import (
    SparsePoly,
    divide_exact,
    matrix_det,
    poly_gcd_many,
    poly_substitute,
    sylvester_resultant,
)

P2_VARS = ("x", "y", "z")
P1P1_VARS = ("t0", "t1", "w0", "w1")
DEFAULT_DEGREE_BUDGET = 4096


def surface_variables(surface: str) -> tuple:
    if surface == "P2":
        return P2_VARS
    if surface == "P1xP1":
        return P1P1_VARS
    raise InputError(f"unknown surface {surface!r}")


@dataclass(frozen=True)
class RationalSelfMap:
    surface: str
    factors: tuple

    @property
    def variables(self) -> tuple:
        return surface_variables(self.surface)

    @property
    def components(self) -> tuple:
        return tuple(p for fac in self.factors for p in fac)

    @property
    def degree(self) -> int:
        """Algebraic degree (P^2 only)."""
        if self.surface != "P2":
            raise InputError("algebraic degree is defined for P2 maps; use bidegrees")
        return _factor_degree(self.factors[0])

    @property
    def bidegrees(self) -> tuple:
        if self.surface != "P1xP1":
            raise InputError("bidegrees are defined for P1xP1 maps")
        return tuple(_factor_bidegree(fac) for fac in self.factors)

    def max_factor_degree(self) -> int:
        if self.surface == "P2":
            return self.degree
        return max(max(bd) for bd in self.bidegrees)

    def evaluate(self, point) -> tuple:
        """Component values at a point; one tuple per factor (projective coordinates)."""
        return tuple(tuple(p.evaluate(point) for p in fac) for fac in self.factors)

    def __str__(self):
        inner = " x ".join("[" + " : ".join(p.render() for p in fac) + "]" for fac in self.factors)
        return f"{self.surface}: {inner}"


def _factor_degree(fac) -> int:
    return max(p.total_degree() for p in fac)


def _factor_bidegree(fac) -> tuple:
    for p in fac:
        if p.terms:
            return p.block_degrees(2)
    return (-1, -1)


def identity_map(surface: str) -> RationalSelfMap:
    v = surface_variables(surface)
    gens = [SparsePoly.variable(v, n) for n in v]
    if surface == "P2":
        return normalize("P2", (tuple(gens),))
    return normalize("P1xP1", ((gens[0], gens[1]), (gens[2], gens[3])))


def _scale_factor(fac: tuple) -> tuple:
    den = 1
    for p in fac:
        for c in p.terms.values():
            den = lcm(den, c.denominator)
    g = 0
    for p in fac:
        for c in p.terms.values():
            g = gcd(g, c.numerator * (den // c.denominator))
    first = next(p for p in fac if p.terms)
    s = Fraction(den, g)
    if first.leading_coeff() < 0:
        s = -s
    return tuple(p.scale(s) for p in fac)


def _check_grading(surface: str, factors: tuple):
    if surface == "P2":
        if len(factors) != 1 or len(factors[0]) != 3:
            raise InputError("a P2 map has one factor with three components")
        degs = {p.homogeneous_degree() for p in factors[0] if p.terms}
        if None in degs or len(degs) > 1:
            raise InputError("P2 components must be forms of one common degree")
    else:
        if len(factors) != 2 or any(len(f) != 2 for f in factors):
            raise InputError("a P1xP1 map has two factors with two components each")
        for fac in factors:
            bds = set()
            for p in fac:
                if not p.terms:
                    continue
                g = p.regrade(2).grading
                if g.kind != "bihomogeneous":
                    raise InputError("P1xP1 components must be bihomogeneous")
                bds.add(g.degrees)
            if len(bds) > 1:
                raise InputError("components of one factor must share a bidegree")


def normalize(surface: str, factors) -> RationalSelfMap:
    """Cancel the common factor of each component tuple and fix scaling and sign."""
    factors = tuple(tuple(fac) for fac in factors)
    variables = surface_variables(surface)
    for fac in factors:
        for p in fac:
            if p.variables != variables:
                raise InputError(f"components must use variables {variables}")
    _check_grading(surface, factors)
    out = []
    split = None if surface == "P2" else 2
    for k, fac in enumerate(factors):
        if all(not p.terms for p in fac):
            raise InputError(f"factor {k} is identically zero")
        g = poly_gcd_many([p for p in fac if p.terms])
        if not g.is_constant():
            fac = tuple(divide_exact(p, g) if p.terms else p for p in fac)
        fac = _scale_factor(fac)
        out.append(tuple(p.regrade(split) if p.terms else p for p in fac))
    return RationalSelfMap(surface, tuple(out))


def _images(g: RationalSelfMap) -> list:
    return list(g.components)


def compose(f: RationalSelfMap, g: RationalSelfMap) -> RationalSelfMap:
    """The normalized composite ``f o g``."""
    if f.surface != g.surface:
        raise InputError("cannot compose maps of different surfaces")
    images = _images(g)
    raw = []
    for k, fac in enumerate(f.factors):
        comps = tuple(poly_substitute(p, images) for p in fac)
        if all(not p.terms for p in comps):
            raise DegenerateCompositionError(
                f"factor {k} of the composite vanishes identically")
        raw.append(comps)
    return normalize(f.surface, raw)


def _predicted_degree(f: RationalSelfMap, g: RationalSelfMap) -> int:
    if f.surface == "P2":
        return f.degree * g.degree
    m = _matmul(pullback_matrix(g), pullback_matrix(f))
    return max(max(row) for row in m)


def iterate(f: RationalSelfMap, n: int, budget: int = DEFAULT_DEGREE_BUDGET) -> list:
    """``[f, f^2, ..., f^n]`` by incremental composition ``f^k = f o f^(k-1)``."""
    if n < 1:
        raise InputError("number of iterates must be positive")
    out = [f]
    while len(out) < n:
        if _predicted_degree(f, out[-1]) > budget:
            raise ResourceError(
                f"degree budget {budget} exceeded at iterate {len(out) + 1}",
                last_completed=len(out), partial=out)
        out.append(compose(f, out[-1]))
    return out


def _matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


def pullback_matrix(f: RationalSelfMap) -> list:
    """Integer matrix of f* on the Neron-Severi group.

    P1xP1 columns are the bidegrees of the two factors in the basis
    e1 = {t = const}, e2 = {w = const}.
    """
    if f.surface == "P2":
        return [[f.degree]]
    (a1, b1), (a2, b2) = f.bidegrees
    return [[a1, a2], [b1, b2]]


def base_points_finite(f: RationalSelfMap) -> bool:
    return all(poly_gcd_many([p for p in fac if p.terms]).is_constant() for fac in f.factors)


def base_scheme_length_p1xp1(f: RationalSelfMap) -> int:
    """Total length of the base schemes of both factors: sum of 2*a*b over the bidegrees."""
    if f.surface != "P1xP1":
        raise PreconditionError("base scheme length is implemented for P1xP1 maps")
    if not base_points_finite(f):
        raise PreconditionError("a factor has a nonconstant common divisor: infinite base scheme")
    return sum(2 * a * b for a, b in f.bidegrees)


# -- regularity ---------------------------------------------------------------

def _monomials(nvars: int, degree: int) -> list:
    if nvars == 1:
        return [(degree,)]
    return [(k,) + rest for k in range(degree, -1, -1) for rest in _monomials(nvars - 1, degree - k)]


def _rank_mod(rows, p):
    rows = [[v % p for v in r] for r in rows]
    rank, ncols = 0, len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(rows)) if rows[r][c]), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], -1, p)
        for r in range(len(rows)):
            if r != rank and rows[r][c]:
                f = rows[r][c] * inv % p
                rows[r] = [(a - f * b) % p for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def rational_rank(rows) -> int:
    """Exact rank of a rational matrix by Gaussian elimination."""
    m = [[Fraction(v) for v in r] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(rank + 1, len(m)):
            if m[r][c]:
                f = m[r][c] / m[rank][c]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def _p2_has_common_zero(forms) -> bool:
    """Whether three ternary forms of degree d share a projective zero.

    Without a common zero the forms are a regular sequence and their ideal
    contains every form of degree 3d - 2; with one, no power of the
    irrelevant ideal is contained.  So the test is the rank of the degree
    3d - 2 Macaulay matrix.
    """
    d = _factor_degree(forms)
    top = 3 * d - 2
    cols = {m: i for i, m in enumerate(_monomials(3, top))}
    rows = []
    for p in forms:
        if not p.terms:
            continue
        for mult in _monomials(3, top - d):
            row = [Fraction(0)] * len(cols)
            for e, c in p.terms.items():
                row[cols[tuple(a + b for a, b in zip(e, mult))]] = c
            rows.append(row)
    den = 1
    for r in rows:
        for v in r:
            den = lcm(den, v.denominator)
    int_rows = [[int(v * den) for v in r] for r in rows]
    if _rank_mod(int_rows, (1 << 61) - 1) == len(cols):
        return False
    return rational_rank(rows) < len(cols)


def _binary_coeffs(p: SparsePoly, i0: int, i1: int, formal: int) -> list:
    """Coefficients (low to high in variable i0) of p as a binary form in (i0, i1)."""
    coeffs = p.coeffs_in(i0)
    coeffs = coeffs + [SparsePoly.zero(p.variables)] * (formal + 1 - len(coeffs))
    out = []
    for c in coeffs:
        # strip the complementary power of the second variable
        terms = {e[:i1] + (0,) + e[i1 + 1:]: v for e, v in c.terms.items()}
        out.append(SparsePoly._raw(p.variables, terms))
    return out


def pair_has_common_zero(p0: SparsePoly, p1: SparsePoly) -> bool:
    """Whether a coprime bihomogeneous pair has a common zero on P1 x P1.

    Eliminates one block with the homogeneous Sylvester resultant (formal
    degrees, so roots at infinity are kept); the result is a binary form in
    the other block, which has a projective zero iff it is zero or of
    positive degree.
    """
    a, b = p0.block_degrees(2)
    if b > 0:
        elim, formal = (2, 3), b
    else:
        elim, formal = (0, 1), a
    res = sylvester_resultant(_binary_coeffs(p0, elim[0], elim[1], formal),
                              _binary_coeffs(p1, elim[0], elim[1], formal))
    return res.is_zero() or not res.is_constant()


def is_regular(f: RationalSelfMap) -> bool:
    """True iff the base locus of every factor is empty."""
    if f.surface == "P2":
        return not _p2_has_common_zero(f.factors[0])
    for fac in f.factors:
        if not poly_gcd_many(list(fac)).is_constant():
            return False
        if pair_has_common_zero(*fac):
            return False
    return True


# -- equality and involutions ---------------------------------------------------

def maps_equal(f: RationalSelfMap, g: RationalSelfMap) -> bool:
    """Projective equality: all cross products vanish in every factor."""
    if f.surface != g.surface:
        raise InputError("maps live on different surfaces")
    for ff, gf in zip(f.factors, g.factors):
        for i, j in combinations(range(len(ff)), 2):
            if not (ff[i] * gf[j] - ff[j] * gf[i]).is_zero():
                return False
        if all(not p.terms for p in gf):
            return False
    return True


@dataclass(frozen=True)
class MoebiusInvolution:
    """The involution ``(t, w) -> (A(w), A^-1(t))`` of P1 x P1."""

    A: tuple

    def __post_init__(self):
        a = tuple(tuple(Fraction(v) for v in row) for row in self.A)
        if len(a) != 2 or any(len(r) != 2 for r in a):
            raise InputError("A must be a 2x2 matrix")
        if matrix_det(a) == 0:
            raise InputError("singular Moebius matrix")
        object.__setattr__(self, "A", a)

    @classmethod
    def reciprocal(cls, K) -> MoebiusInvolution:
        """A(w) = K / w."""
        return cls(((0, K), (1, 0)))

    @classmethod
    def scaling(cls, L) -> MoebiusInvolution:
        """A(w) = L * w."""
        return cls(((L, 0), (0, 1)))

    def as_map(self) -> RationalSelfMap:
        (a, b), (c, d) = self.A
        t0, t1, w0, w1 = (SparsePoly.variable(P1P1_VARS, v) for v in P1P1_VARS)
        # t-block receives A applied to w; w-block receives adj(A) (projectively A^-1) applied to t
        fac1 = (w0.scale(a) + w1.scale(b), w0.scale(c) + w1.scale(d))
        fac2 = (t0.scale(d) - t1.scale(b), t1.scale(a) - t0.scale(c))
        return normalize("P1xP1", (fac1, fac2))


def twist_by_involution(f: RationalSelfMap, iota: MoebiusInvolution) -> RationalSelfMap:
    """The composite ``f o iota``."""
    if f.surface != "P1xP1":
        raise PreconditionError("involution twists are defined on P1xP1")
    return compose(f, iota.as_map())


def bidegree_bound_holds(f: RationalSelfMap, g: RationalSelfMap) -> bool:
    """Submultiplicativity of the composite's degree data."""
    fg = compose(f, g)
    if f.surface == "P2":
        return fg.degree <= f.degree * g.degree
    bound = _matmul(pullback_matrix(g), pullback_matrix(f))
    m = pullback_matrix(fg)
    return all(m[i][j] <= bound[i][j] for i, j in product(range(2), range(2)))

