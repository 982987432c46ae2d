"""Exact spectral data of cone-preserving integer matrices.

Polynomials in this module are plain coefficient lists, lowest degree first.
Real roots are isolated with Sturm sequences and carried as exact rational
intervals; nothing here touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import ROUND_CEILING, ROUND_FLOOR, ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction
from math import ceil, floor

from .errors import InputError, PreconditionError
from .surface import NSLattice, P1XP1_LATTICE, P2_LATTICE

DEFAULT_TOLERANCE = Fraction(1, 10**12)


# -- univariate helpers --------------------------------------------------------

def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def peval(a, x):
    acc = Fraction(0) if isinstance(x, Fraction) else 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def pderiv(a):
    return [k * a[k] for k in range(1, len(a))]


def pdivmod(a, b):
    a = [Fraction(c) for c in _trim(a)]
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    lead = Fraction(b[-1])
    while len(a) >= len(b):
        f = a[-1] / lead
        shift = len(a) - len(b)
        q[shift] = f
        for k, c in enumerate(b):
            a[shift + k] -= f * c
        a = _trim(a)
    return q, a


def pgcd(a, b):
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, pdivmod(a, b)[1]
    if not a:
        return a
    lead = Fraction(a[-1])
    return [Fraction(c) / lead for c in a]


def squarefree_part(a):
    a = _trim(a)
    if len(a) <= 2:
        return a
    g = pgcd(a, pderiv(a))
    return pdivmod(a, g)[0] if len(g) > 1 else a


def sturm_sequence(a):
    seq = [_trim(a), pderiv(_trim(a))]
    while len(seq[-1]) > 1:
        r = pdivmod(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _sign_changes(values):
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def _changes_at(seq, x):
    return _sign_changes([peval(s, x) for s in seq])


def _changes_at_inf(seq):
    return _sign_changes([s[-1] for s in seq])


def roots_above(seq, x) -> int:
    """Distinct real roots in (x, oo) of the first (squarefree) member of ``seq``."""
    return _changes_at(seq, x) - _changes_at_inf(seq)


def roots_between(seq, a, b) -> int:
    """Distinct real roots in (a, b]."""
    return _changes_at(seq, a) - _changes_at(seq, b)


def root_bound(a) -> int:
    """Cauchy bound: every complex root has modulus below this integer."""
    a = _trim(a)
    lead = abs(Fraction(a[-1]))
    return 1 + ceil(max((abs(Fraction(c)) / lead for c in a[:-1]), default=0))


# -- decimal rendering ------------------------------------------------------------

def decimal_string(q, rounding=ROUND_HALF_EVEN, digits: int = 15) -> str:
    """``q`` rounded to ``digits`` significant digits, positional ASCII notation."""
    q = Fraction(q)
    ctx = Context(prec=digits, rounding=rounding)
    d = ctx.divide(Decimal(q.numerator), Decimal(q.denominator))
    if d == 0:
        return "0." + "0" * (digits - 1)
    d = d.quantize(Decimal(1).scaleb(d.adjusted() - digits + 1), context=ctx)
    if d.adjusted() >= digits:
        # rounding carried into a new digit
        d = d.quantize(Decimal(1).scaleb(d.adjusted() - digits + 1), context=ctx)
    return format(d, "f")


# -- matrices -------------------------------------------------------------------

def _matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))]
            for i in range(len(a))]


def _rref(rows):
    m = [[Fraction(v) for v in r] for r in rows]
    pivots = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][c]
        m[r] = [v / p for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def nullspace(rows) -> list:
    """Basis of the right kernel, one vector per free column."""
    n = len(rows[0])
    red, pivots = _rref(rows)
    basis = []
    for free in (c for c in range(n) if c not in pivots):
        v = [Fraction(0)] * n
        v[free] = Fraction(1)
        for row, pc in zip(red, pivots):
            v[pc] = -row[free]
        basis.append(v)
    return basis


def matrix_rank(rows) -> int:
    return len(_rref(rows)[1]) if rows and rows[0] else 0


@dataclass(frozen=True)
class PullbackMatrix:
    """Integer matrix acting on a Neron-Severi lattice, columns = images of basis vectors."""

    entries: tuple
    lattice: NSLattice

    def __post_init__(self):
        try:
            rows = tuple(tuple(int(v) for v in row) for row in self.entries)
        except (TypeError, ValueError):
            raise InputError("matrix entries must be integers") from None
        r = self.lattice.rank
        if len(rows) != r or any(len(row) != r for row in rows):
            raise InputError(f"matrix must be {r}x{r} to act on a rank-{r} lattice")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def for_surface(cls, entries, surface: str) -> PullbackMatrix:
        return cls(entries, P2_LATTICE if surface == "P2" else P1XP1_LATTICE)

    @property
    def size(self) -> int:
        return self.lattice.rank

    def apply(self, vec) -> list:
        return [sum(row[j] * vec[j] for j in range(self.size)) for row in self.entries]

    def power(self, n: int) -> PullbackMatrix:
        m = [[int(i == j) for j in range(self.size)] for i in range(self.size)]
        for _ in range(n):
            m = _matmul(self.entries, m)
        return PullbackMatrix(m, self.lattice)

    def preserves_cone(self) -> bool:
        lat = self.lattice
        return all(all(c >= 0 for c in lat.cone_coordinates(self.apply(g)))
                   for g in lat.nef_generators)


@dataclass
class SpectralResult:
    char_poly: list
    rho_interval: tuple
    rho_exact: Fraction | None = None
    perron_vector: list = field(default_factory=list)
    cone_certified: bool = False
    indeterminate: bool = False

    @property
    def exact_vector(self) -> bool:
        return self.rho_exact is not None


def char_poly(T: PullbackMatrix) -> list:
    """det(xI - T), lowest degree first, by Faddeev-LeVerrier in exact arithmetic."""
    return _faddeev(T.entries)[0]


def _faddeev(a):
    """Characteristic polynomial and the adjugate coefficients of xI - A.

    adj(xI - A) = sum over k of B[k] x^k.
    """
    n = len(a)
    ident = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    coeffs = [Fraction(0)] * (n + 1)
    coeffs[n] = Fraction(1)
    mk = [row[:] for row in ident]
    mats = []
    for k in range(1, n + 1):
        mats.append(mk)
        am = _matmul(a, mk)
        c = -sum(am[i][i] for i in range(n)) / k
        coeffs[n - k] = c
        mk = [[am[i][j] + (c if i == j else 0) for j in range(n)] for i in range(n)]
    # mats[k-1] multiplies x^(n-k)
    adj = [None] * n
    for k, m in enumerate(mats, start=1):
        adj[n - k] = m
    cp = [int(c) for c in coeffs]
    return cp, adj


def _is_root(a, x) -> bool:
    return peval(a, Fraction(x)) == 0


def spectral_radius(T: PullbackMatrix, tolerance=DEFAULT_TOLERANCE) -> SpectralResult:
    """Largest real root of the characteristic polynomial, exact when rational."""
    tolerance = Fraction(tolerance)
    if tolerance <= 0:
        raise InputError("tolerance must be positive")
    if not T.preserves_cone():
        raise PreconditionError("matrix does not map the nef cone into itself")
    cp = char_poly(T)
    exact, lo, hi = largest_real_root(cp, tolerance)
    if exact is not None:
        return SpectralResult(cp, (exact, exact), exact)
    return SpectralResult(cp, (lo, hi))


def largest_real_root(cp, tolerance):
    """``(exact, lo, hi)`` for the largest real root of an integer polynomial.

    ``exact`` is set when the root is rational.  Otherwise the root lies in
    ``(lo, hi]``, ``hi - lo <= tolerance``, and no real root exceeds ``hi``.
    """
    sq = squarefree_part(cp)
    seq = sturm_sequence(sq)
    hi = Fraction(root_bound(sq))
    lo = -hi
    if roots_above(seq, lo) == 0:
        raise PreconditionError("polynomial has no real root")
    lead = _trim(cp)[-1]
    while True:
        # rational roots of a monic integer polynomial are integers
        if abs(lead) == 1:
            for k in range(floor(lo) + 1, floor(hi) + 1) if hi - lo < 2 else ():
                if _is_root(sq, k) and _no_root_above(sq, k):
                    return Fraction(k), Fraction(k), Fraction(k)
        if hi - lo <= tolerance:
            break
        mid = (lo + hi) / 2
        if _is_root(sq, mid):
            if _no_root_above(sq, mid):
                return mid, mid, mid
            lo = mid
        elif roots_above(seq, mid) > 0:
            lo = mid
        else:
            hi = mid
    if abs(lead) != 1:
        k = _rational_root_in(cp, lo, hi)
        if k is not None:
            return k, k, k
    return None, lo, hi


def _no_root_above(sq, x) -> bool:
    x = Fraction(x)
    rest = pdivmod(sq, [-x, 1])[0]
    if len(_trim(rest)) <= 1:
        return True
    return roots_above(sturm_sequence(rest), x) == 0


def _rational_root_in(cp, lo, hi):
    # non-monic input: candidates p/q with q dividing the leading coefficient
    lead = abs(int(_trim(cp)[-1]))
    for q in range(1, lead + 1):
        if lead % q:
            continue
        for p in range(floor(lo * q) + 1, floor(hi * q) + 1):
            x = Fraction(p, q)
            if lo < x <= hi and _is_root(cp, x):
                return x
    return None


# -- Perron vectors ------------------------------------------------------------------

def _normalize_exact(v):
    first = next(c for c in v if c)
    return [c / first for c in v]


def _ival_mul(a, b):
    prods = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
    return (min(prods), max(prods))


def _ival_poly(coeffs, lo, hi):
    """Enclosure of a polynomial over [lo, hi] with 0 < lo (monotone powers)."""
    out_lo = out_hi = Fraction(0)
    plo = phi = Fraction(1)
    for c in coeffs:
        a, b = c * plo, c * phi
        out_lo += min(a, b)
        out_hi += max(a, b)
        plo *= lo
        phi *= hi
    return (out_lo, out_hi)


def perron_vector(T: PullbackMatrix, rho: SpectralResult,
                  tolerance=DEFAULT_TOLERANCE) -> SpectralResult:
    """Fill in the Perron vector and cone certificate of ``rho`` (mutated and returned)."""
    lat = T.lattice
    n = T.size
    if rho.rho_exact is not None:
        r = rho.rho_exact
        shifted = [[T.entries[i][j] - (r if i == j else 0) for j in range(n)] for i in range(n)]
        basis = nullspace(shifted)
        if not basis:
            raise PreconditionError("spectral radius is not an eigenvalue")
        if len(basis) == 1:
            v = _normalize_exact(basis[0])
            if not _nef(lat, v) and _nef(lat, [-c for c in v]):
                v = [-c for c in v]
            rho.perron_vector = v
            rho.cone_certified = _nef(lat, v)
            return rho
        # degenerate eigenspace: first generator (declared order) inside it
        inside = [g for g in lat.nef_generators
                  if all(x == r * y for x, y in zip(T.apply(g), g))]
        if inside:
            rho.perron_vector = [Fraction(c) for c in inside[0]]
            rho.cone_certified = True
            return rho
        for b in basis:
            for v in (_normalize_exact(b), [-c for c in _normalize_exact(b)]):
                if _nef(lat, v):
                    rho.perron_vector = v
                    rho.cone_certified = True
                    return rho
        rho.perron_vector = _normalize_exact(basis[0])
        rho.indeterminate = True
        return rho
    return _interval_perron(T, rho, Fraction(tolerance))


def _nef(lat, v) -> bool:
    return all(c >= 0 for c in lat.cone_coordinates(v))


def _interval_perron(T, rho, tolerance):
    cp, adj = _faddeev(T.entries)
    n = T.size
    sq = squarefree_part(cp)
    lo, hi = rho.rho_interval
    lat = T.lattice
    for _ in range(8):
        lo, hi = _refine_positive(sq, lo, hi)
        result = _try_columns(adj, sq, lo, hi, n, lat)
        if result is not None:
            vec, certified = result
            rho.perron_vector = vec
            rho.cone_certified = certified
            rho.indeterminate = not certified
            if certified:
                return rho
        # tighten and retry
        lo, hi = _bisect(sq, lo, hi, (hi - lo) / 2**20)
    rho.indeterminate = True
    return rho


def _refine_positive(sq, lo, hi):
    seq = sturm_sequence(sq)
    while lo <= 0:
        mid = (lo + hi) / 2
        if roots_above(seq, mid) > 0:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _bisect(sq, lo, hi, width):
    seq = sturm_sequence(sq)
    while hi - lo > width:
        mid = (lo + hi) / 2
        if roots_above(seq, mid) > 0:
            lo = mid
        else:
            hi = mid
    return lo, hi


def _entry_is_zero(entry, sq, lo, hi) -> bool:
    g = pgcd(entry, sq)
    if len(g) <= 1:
        return False
    return roots_between(sturm_sequence(g), lo, hi) > 0


def _try_columns(adj, sq, lo, hi, n, lat):
    # column j of adj(rho I - T) lies in the kernel of T - rho I
    best = None
    for j in range(n):
        entries = [[adj[k][i][j] for k in range(n)] for i in range(n)]
        ivals = []
        for e in entries:
            if _entry_is_zero(e, sq, lo, hi):
                ivals.append((Fraction(0), Fraction(0)))
            else:
                ivals.append(_ival_poly(e, lo, hi))
        nonzero = [iv for iv in ivals if iv != (0, 0)]
        if not nonzero:
            continue
        if all(iv[1] <= 0 for iv in nonzero):
            ivals = [(-b, -a) for a, b in ivals]
        first = next((iv for iv in ivals if iv != (0, 0)), None)
        if first[0] > 0:
            # divide by the first nonzero entry so it becomes ~1
            inv = (1 / first[1], 1 / first[0])
            ivals = [_ival_mul(iv, inv) for iv in ivals]
        coords = _ival_cone_coords(lat, ivals)
        certified = all(c[0] >= 0 for c in coords) and sum(c[0] for c in coords) > 0
        if certified:
            return ivals, True
        if best is None:
            best = (ivals, False)
    return best


def _ival_cone_coords(lat, ivals):
    n = lat.rank
    cols = [lat.cone_coordinates([int(i == j) for i in range(n)]) for j in range(n)]
    out = []
    for i in range(n):
        a = b = Fraction(0)
        for j in range(n):
            c = cols[j][i]
            lo, hi = ivals[j]
            a += min(c * lo, c * hi)
            b += max(c * lo, c * hi)
        out.append((a, b))
    return out


def rank_and_trace(T: PullbackMatrix) -> tuple:
    return matrix_rank(T.entries), sum(T.entries[i][i] for i in range(T.size))


def analyze_matrix(T: PullbackMatrix, tolerance=DEFAULT_TOLERANCE) -> SpectralResult:
    return perron_vector(T, spectral_radius(T, tolerance), tolerance)


def krein_rutman_check(T: PullbackMatrix, tolerance=DEFAULT_TOLERANCE) -> bool:
    """The cone-preserving matrix has its spectral radius as a real eigenvalue with a nef eigenvector."""
    res = analyze_matrix(T, tolerance)
    lo, hi = res.rho_interval
    if res.rho_exact is not None:
        if peval(res.char_poly, res.rho_exact) != 0:
            return False
    else:
        seq = sturm_sequence(squarefree_part(res.char_poly))
        if roots_between(seq, lo, hi) < 1:
            return False
    if roots_above(sturm_sequence(squarefree_part(res.char_poly)), hi) != 0:
        return False
    return res.cone_certified or res.indeterminate


def interval_strings(lo, hi) -> list:
    """Outward-rounded decimal strings for an interval."""
    return [decimal_string(lo, ROUND_FLOOR), decimal_string(hi, ROUND_CEILING)]


def result_to_dict(res: SpectralResult) -> dict:
    """JSON-native rendering of the radius and Perron vector."""
    lo, hi = res.rho_interval
    radius = {"exact": str(res.rho_exact) if res.rho_exact is not None else None,
              "interval": interval_strings(lo, hi)}
    if res.rho_exact is not None:
        entries = [str(c) for c in res.perron_vector]
    else:
        entries = [interval_strings(a, b) for a, b in res.perron_vector]
    vector = {"entries": entries, "cone_certified": res.cone_certified,
              "indeterminate": res.indeterminate}
    return {"char_poly": list(res.char_poly), "spectral_radius": radius, "perron_vector": vector}
