"""Exact sparse multivariate polynomials over the rationals.

Coefficients are :class:`fractions.Fraction`; there is no floating point
anywhere in this module.  Polynomials are immutable values carrying an
ordered variable list and an optional grading tag (homogeneous or
bihomogeneous with a split of the variable list into two blocks).

The monomial order is graded lexicographic with the declared variable order
(first variable largest).  It is only used to pick canonical leading
coefficients, for rendering, and inside exact division.
"""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt, lcm
from typing import Iterable, Mapping, Sequence

from .errors import InputError

Rational = Fraction

# Prime used by the modular coprimality certificate.
_PRIME = (1 << 61) - 1


@dataclass(frozen=True)
class Grading:
    kind: str = "ungraded"
    degrees: tuple = ()
    split: int | None = None

    def __str__(self):
        if self.kind == "homogeneous":
            return f"homogeneous({self.degrees[0]})"
        if self.kind == "bihomogeneous":
            a, b = self.degrees
            return f"bihomogeneous({a},{b};split={self.split})"
        return "ungraded"


UNGRADED = Grading()


def homogeneous(d: int) -> Grading:
    return Grading("homogeneous", (d,))


def bihomogeneous(a: int, b: int, split: int) -> Grading:
    return Grading("bihomogeneous", (a, b), split)


def grlex_key(exps):
    return (sum(exps), exps)


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, str)):
        return Fraction(c)
    raise InputError(f"coefficient {c!r} is not an exact rational")


def _term_fits(exps, grading: Grading) -> bool:
    if grading.kind == "homogeneous":
        return sum(exps) == grading.degrees[0]
    if grading.kind == "bihomogeneous":
        s = grading.split
        return (sum(exps[:s]), sum(exps[s:])) == grading.degrees
    return True


class SparsePoly:
    """Immutable sparse polynomial ``{exponent tuple: Fraction}``."""

    __slots__ = ("variables", "terms", "grading")

    def __init__(self, variables: Sequence[str], terms=(), grading: Grading = UNGRADED):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise InputError(f"duplicate variable names in {variables}")
        n = len(variables)
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict = {}
        for exps, c in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise InputError(f"exponent vector {exps} does not match {n} variables")
            if any(e < 0 for e in exps):
                raise InputError(f"negative exponent in {exps}")
            clean[exps] = clean.get(exps, 0) + _as_fraction(c)
        clean = {e: c for e, c in clean.items() if c}
        if grading.kind == "bihomogeneous" and not 0 <= grading.split <= n:
            raise InputError("bihomogeneous split outside the variable list")
        for exps in clean:
            if not _term_fits(exps, grading):
                raise InputError(f"term {exps} violates grading {grading}")
        self.variables = variables
        self.terms = clean
        self.grading = grading

    @classmethod
    def _raw(cls, variables, terms, grading=UNGRADED):
        # trusted constructor: terms already clean and consistent with grading
        obj = object.__new__(cls)
        obj.variables = variables
        obj.terms = terms
        obj.grading = grading
        return obj

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, variables, grading=UNGRADED):
        return cls._raw(tuple(variables), {}, grading)

    @classmethod
    def constant(cls, variables, c):
        variables = tuple(variables)
        c = _as_fraction(c)
        terms = {(0,) * len(variables): c} if c else {}
        return cls._raw(variables, terms, homogeneous(0))

    @classmethod
    def one(cls, variables):
        return cls.constant(variables, 1)

    @classmethod
    def variable(cls, variables, name):
        variables = tuple(variables)
        i = variables.index(name)
        exps = tuple(1 if j == i else 0 for j in range(len(variables)))
        return cls._raw(variables, {exps: Fraction(1)}, homogeneous(1))

    # -- basic queries ----------------------------------------------------

    def _index(self, var) -> int:
        if isinstance(var, int):
            if not 0 <= var < len(self.variables):
                raise InputError(f"variable index {var} out of range")
            return var
        try:
            return self.variables.index(var)
        except ValueError:
            raise InputError(f"unknown variable {var!r}") from None

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise InputError("polynomial is not constant")
        return next(iter(self.terms.values()), Fraction(0))

    def total_degree(self) -> int:
        """Maximal total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def degree(self, var) -> int:
        """Degree in one variable; -1 for the zero polynomial."""
        i = self._index(var)
        return max((e[i] for e in self.terms), default=-1)

    def degrees(self) -> tuple:
        n = len(self.variables)
        out = [0] * n
        for e in self.terms:
            for i in range(n):
                if e[i] > out[i]:
                    out[i] = e[i]
        return tuple(out)

    def block_degrees(self, split: int) -> tuple:
        if not self.terms:
            return (-1, -1)
        return (max(sum(e[:split]) for e in self.terms), max(sum(e[split:]) for e in self.terms))

    def leading_term(self):
        if not self.terms:
            raise InputError("zero polynomial has no leading term")
        e = max(self.terms, key=grlex_key)
        return e, self.terms[e]

    def leading_coeff(self) -> Fraction:
        return self.leading_term()[1] if self.terms else Fraction(0)

    def homogeneous_degree(self):
        """Common total degree of all terms, or None."""
        degs = {sum(e) for e in self.terms}
        return degs.pop() if len(degs) == 1 else None

    def regrade(self, split: int | None = None) -> SparsePoly:
        """Return a copy tagged with the most specific grading its terms satisfy."""
        if not self.terms:
            return self
        if split is not None:
            bd = {(sum(e[:split]), sum(e[split:])) for e in self.terms}
            if len(bd) == 1:
                a, b = bd.pop()
                return SparsePoly._raw(self.variables, self.terms, bihomogeneous(a, b, split))
        d = self.homogeneous_degree()
        tag = homogeneous(d) if d is not None else UNGRADED
        return SparsePoly._raw(self.variables, self.terms, tag)

    def with_grading(self, grading: Grading) -> SparsePoly:
        return SparsePoly(self.variables, self.terms, grading)

    def satisfies_grading(self) -> bool:
        return all(_term_fits(e, self.grading) for e in self.terms)

    # -- arithmetic -------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, SparsePoly):
            if other.variables != self.variables:
                raise InputError(
                    f"variable lists differ: {self.variables} vs {other.variables}")
            return other
        if isinstance(other, (int, Fraction)):
            return SparsePoly.constant(self.variables, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for e, c in other.terms.items():
            v = terms.get(e, 0) + c
            if v:
                terms[e] = v
            else:
                terms.pop(e, None)
        return SparsePoly._raw(self.variables, terms, _add_grading(self, other))

    __radd__ = __add__

    def __neg__(self):
        return SparsePoly._raw(self.variables, {e: -c for e, c in self.terms.items()}, self.grading)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def scale(self, c) -> SparsePoly:
        c = _as_fraction(c)
        if not c:
            return SparsePoly._raw(self.variables, {}, self.grading)
        return SparsePoly._raw(self.variables, {e: v * c for e, v in self.terms.items()}, self.grading)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = _mul_terms(self.terms, other.terms, len(self.variables))
        return SparsePoly._raw(self.variables, terms, _mul_grading(self, other))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise InputError("exponent must be a non-negative integer")
        result = SparsePoly.one(self.variables)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_constant() and self.constant_value() == other
        if not isinstance(other, SparsePoly):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    # -- evaluation / substitution ---------------------------------------

    def evaluate(self, point) -> Fraction:
        """Evaluate at a point given as a sequence or a ``{name: value}`` mapping."""
        if isinstance(point, Mapping):
            point = [point[v] for v in self.variables]
        if len(point) != len(self.variables):
            raise InputError("point dimension does not match the variable count")
        point = [_as_fraction(v) for v in point]
        total = Fraction(0)
        for exps, c in self.terms.items():
            t = c
            for v, e in zip(point, exps):
                if e:
                    t *= v ** e
            total += t
        return total

    def specialize(self, values: Mapping) -> SparsePoly:
        """Set some variables to rational values; the variable list is kept."""
        idx = {self._index(k): _as_fraction(v) for k, v in values.items()}
        terms: dict = {}
        for exps, c in self.terms.items():
            for i, v in idx.items():
                if exps[i]:
                    c = c * v ** exps[i]
            if not c:
                continue
            e = tuple(0 if i in idx else x for i, x in enumerate(exps))
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return SparsePoly._raw(self.variables, terms, UNGRADED).regrade()

    def derivative(self, var) -> SparsePoly:
        i = self._index(var)
        terms = {}
        for exps, c in self.terms.items():
            if exps[i]:
                e = list(exps)
                e[i] -= 1
                terms[tuple(e)] = c * exps[i]
        return SparsePoly._raw(self.variables, terms, UNGRADED).regrade()

    def coeffs_in(self, var) -> list:
        """Coefficients as a polynomial in ``var``: ``[c_0, c_1, ..., c_deg]``.

        Each coefficient keeps the full variable list with the ``var``
        exponent set to zero.
        """
        i = self._index(var)
        buckets: dict = {}
        for exps, c in self.terms.items():
            k = exps[i]
            e = exps[:i] + (0,) + exps[i + 1:]
            buckets.setdefault(k, {})[e] = c
        if not buckets:
            return []
        top = max(buckets)
        return [SparsePoly._raw(self.variables, buckets.get(k, {}), UNGRADED) for k in range(top + 1)]

    @classmethod
    def from_coeffs(cls, variables, var_index, coeffs) -> SparsePoly:
        terms = {}
        for k, c in enumerate(coeffs):
            for exps, v in c.terms.items():
                e = exps[:var_index] + (exps[var_index] + k,) + exps[var_index + 1:]
                terms[e] = terms.get(e, 0) + v
        terms = {e: v for e, v in terms.items() if v}
        return cls._raw(tuple(variables), terms, UNGRADED)

    def substitute(self, images) -> SparsePoly:
        return poly_substitute(self, images)

    # -- rendering --------------------------------------------------------

    def render(self) -> str:
        """Canonical text: grlex-descending terms, ``*`` products, ``^`` powers."""
        if not self.terms:
            return "0"
        out = []
        for exps, c in sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]), reverse=True):
            mono = "*".join(v if e == 1 else f"{v}^{e}"
                            for v, e in zip(self.variables, exps) if e)
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            if not out:
                out.append(("-" if c < 0 else "") + body)
            else:
                out.append((" - " if c < 0 else " + ") + body)
        return "".join(out)

    __str__ = render

    def __repr__(self):
        return f"SparsePoly({self.render()!r}, variables={self.variables})"


# -- grading propagation ---------------------------------------------------

def _add_grading(p: SparsePoly, q: SparsePoly) -> Grading:
    if p.grading == q.grading:
        return p.grading
    if not p.terms:
        return q.grading
    if not q.terms:
        return p.grading
    return UNGRADED


def _mul_grading(p: SparsePoly, q: SparsePoly) -> Grading:
    a, b = p.grading, q.grading
    if a.kind == b.kind == "homogeneous":
        return homogeneous(a.degrees[0] + b.degrees[0])
    if a.kind == b.kind == "bihomogeneous" and a.split == b.split:
        return bihomogeneous(a.degrees[0] + b.degrees[0], a.degrees[1] + b.degrees[1], a.split)
    # a constant (homogeneous(0)) is also bihomogeneous(0, 0)
    if a.kind == "bihomogeneous" and b == homogeneous(0):
        return a
    if b.kind == "bihomogeneous" and a == homogeneous(0):
        return b
    return UNGRADED


# -- kernels ---------------------------------------------------------------

def _to_int_terms(terms):
    den = 1
    for c in terms.values():
        if c.denominator != 1:
            den = lcm(den, c.denominator)
    if den == 1:
        return {e: c.numerator for e, c in terms.items()}, 1
    return {e: c.numerator * (den // c.denominator) for e, c in terms.items()}, den


def _mul_terms(a: dict, b: dict, nvars: int) -> dict:
    if not a or not b:
        return {}
    ia, da = _to_int_terms(a)
    ib, db = _to_int_terms(b)
    top = max(map(sum, ia)) + max(map(sum, ib))
    bits = top.bit_length() + 1
    shifts = [bits * i for i in range(nvars)]
    pa = [(sum(e << s for e, s in zip(exps, shifts)), c) for exps, c in ia.items()]
    pb = [(sum(e << s for e, s in zip(exps, shifts)), c) for exps, c in ib.items()]
    if len(pa) > len(pb):
        pa, pb = pb, pa
    acc: dict = {}
    get = acc.get
    for ka, ca in pa:
        for kb, cb in pb:
            k = ka + kb
            acc[k] = get(k, 0) + ca * cb
    mask = (1 << bits) - 1
    den = da * db
    out = {}
    for k, c in acc.items():
        if c:
            exps = tuple((k >> s) & mask for s in shifts)
            out[exps] = Fraction(c, den) if den != 1 else Fraction(c)
    return out


def _check_same(p: SparsePoly, q: SparsePoly):
    if p.variables != q.variables:
        raise InputError(f"variable lists differ: {p.variables} vs {q.variables}")


def poly_arith(op: str, p: SparsePoly, q: SparsePoly) -> SparsePoly:
    _check_same(p, q)
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise InputError(f"unknown operation {op!r}")


def divide_exact(p: SparsePoly, q: SparsePoly) -> SparsePoly:
    """Return ``p / q``; raises :class:`InputError` if the division leaves a remainder."""
    _check_same(p, q)
    if not q.terms:
        raise InputError("division by the zero polynomial")
    if not p.terms:
        return SparsePoly._raw(p.variables, {}, UNGRADED)
    if q.is_constant():
        return p.scale(1 / q.constant_value()).regrade()
    lq_e, lq_c = q.leading_term()
    q_items = [(e, c) for e, c in q.terms.items() if e != lq_e]
    rem = dict(p.terms)
    heap = [(-sum(e), tuple(-x for x in e)) for e in rem]
    heapq.heapify(heap)
    quot = {}
    while rem:
        while True:
            nd, ne = heapq.heappop(heap)
            e = tuple(-x for x in ne)
            if e in rem:
                break
        c = rem.pop(e)
        d = tuple(a - b for a, b in zip(e, lq_e))
        if any(x < 0 for x in d):
            raise InputError("inexact polynomial division")
        m = c / lq_c
        quot[d] = m
        for qe, qc in q_items:
            k = tuple(a + b for a, b in zip(d, qe))
            old = rem.get(k)
            if old is None:
                rem[k] = -m * qc
                heapq.heappush(heap, (-sum(k), tuple(-x for x in k)))
            else:
                v = old - m * qc
                if v:
                    rem[k] = v
                else:
                    del rem[k]
    return SparsePoly._raw(p.variables, quot, UNGRADED).regrade()


def primitive(p: SparsePoly) -> SparsePoly:
    """Integer coefficients with content 1 and positive grlex leading coefficient."""
    if not p.terms:
        return p
    it, _ = _to_int_terms(p.terms)
    g = 0
    for c in it.values():
        g = gcd(g, c)
        if g == 1:
            break
    if p.leading_coeff() < 0:
        g = -g
    return SparsePoly._raw(p.variables, {e: Fraction(c // g) for e, c in it.items()}, p.grading)


# -- gcd -------------------------------------------------------------------

def _spec_mod(int_terms: dict, i: int, point) -> list:
    """Univariate image in variable i (coefficients mod _PRIME), other variables at ``point``."""
    deg = max(e[i] for e in int_terms)
    out = [0] * (deg + 1)
    for exps, c in int_terms.items():
        v = c % _PRIME
        for j, e in enumerate(exps):
            if e and j != i:
                v = v * pow(point[j], e, _PRIME) % _PRIME
        out[exps[i]] = (out[exps[i]] + v) % _PRIME
    return out


def _strip(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _rem_mod(a, b):
    a = list(a)
    inv = pow(b[-1], -1, _PRIME)
    db = len(b) - 1
    while len(a) - 1 >= db and a:
        f = a[-1] * inv % _PRIME
        shift = len(a) - 1 - db
        for k in range(db + 1):
            a[shift + k] = (a[shift + k] - f * b[k]) % _PRIME
        _strip(a)
    return a


def _gcd_degree_mod(a, b) -> int:
    a, b = _strip(list(a)), _strip(list(b))
    while b:
        a, b = b, _rem_mod(a, b)
    return len(a) - 1


def _certify_coprime(p: SparsePoly, q: SparsePoly) -> bool:
    """Sound certificate that gcd(p, q) is constant.

    For each variable present in both, specialize the others at a random
    point mod a large prime.  The true gcd g divides p over Z, so if the
    leading coefficient of p in that variable survives the specialization,
    deg g is bounded by the degree of the modular univariate gcd.  False
    means "not certified", never "not coprime".
    """
    rng = random.Random(0x5EED)
    ip, _ = _to_int_terms(p.terms)
    iq, _ = _to_int_terms(q.terms)
    dp, dq = p.degrees(), q.degrees()
    n = len(p.variables)
    for i in range(n):
        if dp[i] == 0 or dq[i] == 0:
            continue
        done = False
        for _ in range(2):
            point = [rng.randrange(1, _PRIME) for _ in range(n)]
            up = _spec_mod(ip, i, point)
            if up[-1] == 0:
                continue
            uq = _spec_mod(iq, i, point)
            if _gcd_degree_mod(up, uq) == 0:
                done = True
                break
            return False
        if not done:
            return False
    return True


def _content(p: SparsePoly, i: int) -> SparsePoly:
    """Gcd of the coefficients of p viewed as a polynomial in variable i."""
    one = SparsePoly.one(p.variables)
    g = None
    for c in p.coeffs_in(i):
        if not c.terms:
            continue
        if c.is_constant():
            return one
        g = c if g is None else _gcd(g, c)
        if g.is_constant():
            return one
    return primitive(g) if g is not None else SparsePoly.zero(p.variables)


def _prem(a: list, b: list) -> list:
    """Pseudo-remainder of coefficient lists (low to high degree)."""
    db = len(b) - 1
    lc = b[-1]
    r = list(a)
    e = len(a) - len(b) + 1
    while r and len(r) - 1 >= db:
        lr = r[-1]
        shift = len(r) - 1 - db
        r = [c * lc for c in r]
        for k, bc in enumerate(b):
            r[shift + k] = r[shift + k] - lr * bc
        while r and not r[-1].terms:
            r.pop()
        e -= 1
    if r and e > 0:
        f = lc ** e
        r = [c * f for c in r]
    return r


def _primitive_list(r: list) -> list:
    """Divide a coefficient list by its polynomial and integer content."""
    g = None
    for c in r:
        if not c.terms:
            continue
        g = c if g is None else _gcd(g, c)
        if g.is_constant():
            g = None
            break
    if g is not None:
        r = [divide_exact(c, g) if c.terms else c for c in r]
    den = 1
    for c in r:
        for v in c.terms.values():
            den = lcm(den, v.denominator)
    ig = 0
    for c in r:
        for v in c.terms.values():
            ig = gcd(ig, v.numerator * (den // v.denominator))
    scale = Fraction(den, ig) if ig else Fraction(1)
    if r[-1].leading_coeff() < 0:
        scale = -scale
    return [c.scale(scale) for c in r]


def _eval_var(f: dict, v: int, xi: int) -> dict:
    out: dict = {}
    powers = [1]
    for _ in range(max(e[v] for e in f)):
        powers.append(powers[-1] * xi)
    for e, c in f.items():
        k = e[:v] + (0,) + e[v + 1:]
        out[k] = out.get(k, 0) + c * powers[e[v]]
    return {k: c for k, c in out.items() if c}


def _interp_var(h: dict, v: int, xi: int) -> dict:
    """Undo evaluation at xi by symmetric base-xi expansion of each coefficient."""
    out = {}
    half = xi // 2
    for e, c in h.items():
        k = 0
        while c:
            d = c % xi
            if d > half:
                d -= xi
            if d:
                out[e[:v] + (k,) + e[v + 1:]] = d
            c = (c - d) // xi
            k += 1
    return out


def _int_content(f: dict) -> int:
    c = 0
    for v in f.values():
        c = gcd(c, v)
        if c == 1:
            break
    return c


def _heu(f: dict, g: dict, active: list):
    """Heuristic gcd of integer polynomials (evaluation / xi-adic reconstruction).

    Returns the exact gcd (content included), or None when no evaluation
    point worked.  A primitive candidate that divides both primitive parts
    is the gcd of those parts, provided xi exceeds twice the smaller norm.
    """
    if not active:
        (kf, cf), = f.items()
        (_, cg), = g.items()
        return {kf: gcd(cf, cg)}
    cf, cg = _int_content(f), _int_content(g)
    c = gcd(cf, cg)
    f = {e: v // cf for e, v in f.items()}
    g = {e: v // cg for e, v in g.items()}
    v, rest = active[0], active[1:]
    nf = max(abs(x) for x in f.values())
    ng = max(abs(x) for x in g.values())
    b = 2 * min(nf, ng) + 29
    xi = max(min(b, 99 * isqrt(b)), 2 * min(nf, ng) + 2)
    vars_ = ("_",) * len(next(iter(f)))
    pf = SparsePoly._raw(vars_, {e: Fraction(x) for e, x in f.items()})
    pg = SparsePoly._raw(vars_, {e: Fraction(x) for e, x in g.items()})
    for _ in range(6):
        ff, gg = _eval_var(f, v, xi), _eval_var(g, v, xi)
        if ff and gg:
            h = _heu(ff, gg, rest)
            if h is not None:
                cand = _interp_var(h, v, xi)
                if cand:
                    cp = primitive(SparsePoly._raw(vars_, {e: Fraction(x) for e, x in cand.items()}))
                    try:
                        divide_exact(pf, cp)
                        divide_exact(pg, cp)
                        return {e: c * x.numerator for e, x in cp.terms.items()}
                    except InputError:
                        pass
        xi = xi * 73794 * isqrt(isqrt(xi)) // 27011
    return None


def _monomial_content(p: SparsePoly) -> tuple:
    it = iter(p.terms)
    low = list(next(it))
    for e in it:
        for i, v in enumerate(e):
            if v < low[i]:
                low[i] = v
    return tuple(low)


def _shift_down(p: SparsePoly, mono: tuple) -> SparsePoly:
    if not any(mono):
        return p
    return SparsePoly._raw(p.variables,
                           {tuple(a - b for a, b in zip(e, mono)): c for e, c in p.terms.items()})


def _gcd(p: SparsePoly, q: SparsePoly) -> SparsePoly:
    vars_ = p.variables
    one = SparsePoly.one(vars_)
    if not p.terms:
        return primitive(q)
    if not q.terms:
        return primitive(p)
    if p.is_constant() or q.is_constant():
        return one
    if p == q:
        return primitive(p)
    mp, mq = _monomial_content(p), _monomial_content(q)
    if any(mp) or any(mq):
        mono = tuple(min(a, b) for a, b in zip(mp, mq))
        rest = _gcd(_shift_down(p, mp), _shift_down(q, mq))
        if not any(mono):
            return rest
        return primitive(rest * SparsePoly._raw(vars_, {mono: Fraction(1)}))
    dp, dq = p.degrees(), q.degrees()
    # a variable occurring in only one argument cannot occur in the gcd
    for i in range(len(vars_)):
        if dp[i] > 0 and dq[i] == 0:
            return _gcd(_content(p, i), q)
        if dq[i] > 0 and dp[i] == 0:
            return _gcd(p, _content(q, i))
    if _certify_coprime(p, q):
        return one
    shared = [i for i in range(len(vars_)) if dp[i] > 0 and dq[i] > 0]
    ip, iq = primitive(p), primitive(q)
    cand = _heu({e: c.numerator for e, c in ip.terms.items()},
                {e: c.numerator for e, c in iq.terms.items()}, shared)
    if cand is not None:
        h = primitive(SparsePoly._raw(vars_, {e: Fraction(c) for e, c in cand.items()}))
        if h.is_constant():
            return one
        if _certify_coprime(divide_exact(p, h), divide_exact(q, h)):
            return h
    i = min(shared, key=lambda j: (max(dp[j], dq[j]), j))
    cp, cq = _content(p, i), _content(q, i)
    a = divide_exact(p, cp) if not cp.is_constant() else p
    b = divide_exact(q, cq) if not cq.is_constant() else q
    c = _gcd(cp, cq)
    A, B = a.coeffs_in(i), b.coeffs_in(i)
    if len(A) < len(B):
        A, B = B, A
    B = _primitive_list(B)
    while True:
        R = _prem(A, B)
        if not R:
            break
        if len(R) == 1:
            return primitive(c)
        A, B = B, _primitive_list(R)
    h = SparsePoly.from_coeffs(vars_, i, B)
    return primitive(c * h)


def _blocks(p: SparsePoly, q: SparsePoly, split):
    """Variable blocks in which both arguments are homogeneous, or None."""
    n = len(p.variables)
    if not p.terms or not q.terms or n < 2:
        return None
    if split is not None and q.grading.kind == "bihomogeneous":
        return [range(0, split), range(split, n)] if 1 < split < n - 1 else None
    if p.homogeneous_degree() is not None and q.homogeneous_degree() is not None:
        return [range(n)]
    return None


def _graded_gcd(p: SparsePoly, q: SparsePoly, blocks) -> SparsePoly:
    # strip monomials, set the last variable of each block to 1, rehomogenize
    mp, mq = _monomial_content(p), _monomial_content(q)
    mono = tuple(min(a, b) for a, b in zip(mp, mq))
    p, q = _shift_down(p, mp), _shift_down(q, mq)
    last = {blk[-1] for blk in blocks}
    point = {p.variables[i]: 1 for i in last}
    h = _gcd(p.specialize(point), q.specialize(point))
    tot = [max(sum(e[i] for i in blk) for e in h.terms) for blk in blocks]
    terms = {}
    for e, c in h.terms.items():
        e = list(e)
        for blk, t in zip(blocks, tot):
            e[blk[-1]] = t - sum(e[i] for i in blk)
        terms[tuple(a + b for a, b in zip(e, mono))] = c
    return primitive(SparsePoly._raw(p.variables, terms))


def poly_gcd(p: SparsePoly, q: SparsePoly) -> SparsePoly:
    """Greatest common divisor, primitive with positive grlex leading coefficient.

    gcd(0, q) is q normalized; gcd(0, 0) is 0.
    """
    _check_same(p, q)
    split = None
    if p.grading.kind == "bihomogeneous" and p.grading.split == q.grading.split:
        split = p.grading.split
    blocks = _blocks(p, q, split)
    g = _graded_gcd(p, q, blocks) if blocks else _gcd(p, q)
    return SparsePoly._raw(g.variables, g.terms, UNGRADED).regrade(split)


def poly_gcd_many(polys: Iterable[SparsePoly]) -> SparsePoly:
    polys = list(polys)
    g = polys[0]
    for q in polys[1:]:
        g = poly_gcd(g, q)
        if g.is_constant() and g.terms:
            break
    if len(polys) == 1:
        g = poly_gcd(g, g)
    return g


# -- resultants --------------------------------------------------------------

def bareiss_det(rows: list) -> SparsePoly:
    """Fraction-free determinant of a square matrix of polynomials."""
    m = [list(r) for r in rows]
    n = len(m)
    if n == 0:
        raise InputError("empty matrix")
    vars_ = m[0][0].variables
    sign = 1
    prev = None
    for k in range(n - 1):
        if not m[k][k].terms:
            for r in range(k + 1, n):
                if m[r][k].terms:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return SparsePoly.zero(vars_)
        pivot = m[k][k]
        for i in range(k + 1, n):
            mik = m[i][k]
            for j in range(k + 1, n):
                v = m[i][j] * pivot
                if mik.terms and m[k][j].terms:
                    v = v - mik * m[k][j]
                if prev is not None and v.terms:
                    v = divide_exact(v, prev)
                m[i][j] = v
        prev = pivot
    det = m[n - 1][n - 1]
    return -det if sign < 0 else det


def sylvester_resultant(P: list, Q: list) -> SparsePoly:
    """Resultant from coefficient lists (low to high) with formal degrees len-1.

    The Sylvester matrix places the rows of the first argument on top.
    """
    m, n = len(P) - 1, len(Q) - 1
    vars_ = P[0].variables
    zero = SparsePoly.zero(vars_)
    if m == 0 and n == 0:
        return SparsePoly.one(vars_)
    size = m + n
    rows = []
    for r in range(n):
        row = [zero] * size
        for k in range(m + 1):
            row[r + k] = P[m - k]
        rows.append(row)
    for r in range(m):
        row = [zero] * size
        for k in range(n + 1):
            row[r + k] = Q[n - k]
        rows.append(row)
    return bareiss_det(rows)


def poly_resultant(p: SparsePoly, q: SparsePoly, var) -> SparsePoly:
    """Sylvester resultant of p and q with respect to ``var``.

    If one argument does not involve ``var`` the resultant is that argument
    raised to the other's degree; with a zero argument it is zero.
    """
    _check_same(p, q)
    if not p.terms and not q.terms:
        raise InputError("resultant of two zero polynomials")
    i = p._index(var)
    if not p.terms or not q.terms:
        return SparsePoly.zero(p.variables)
    r = sylvester_resultant(p.coeffs_in(i), q.coeffs_in(i))
    return SparsePoly._raw(r.variables, r.terms, UNGRADED).regrade()


# -- squarefree, substitution, linear change -------------------------------

def poly_squarefree(p: SparsePoly, var) -> SparsePoly:
    """Squarefree part ``p / gcd(p, dp/dvar)`` of a univariate polynomial."""
    if not p.terms:
        raise InputError("squarefree part of the zero polynomial")
    i = p._index(var)
    if any(e[j] for e in p.terms for j in range(len(e)) if j != i):
        raise InputError(f"polynomial is not univariate in {p.variables[i]}")
    g = poly_gcd(p, p.derivative(i))
    return primitive(divide_exact(p, g))


def poly_substitute(p: SparsePoly, images: Sequence[SparsePoly]) -> SparsePoly:
    """Replace each variable of p by the corresponding image polynomial."""
    images = list(images)
    if len(images) != len(p.variables):
        raise InputError(f"expected {len(p.variables)} images, got {len(images)}")
    target = images[0].variables
    for img in images:
        if img.variables != target:
            raise InputError("substitution images must share one variable list")
    powers = [[SparsePoly.one(target), img] for img in images]

    def power(i, e):
        cache = powers[i]
        while len(cache) <= e:
            cache.append(cache[-1] * images[i])
        return cache[e]

    acc: dict = {}
    for exps, c in p.terms.items():
        term = None
        for i, e in enumerate(exps):
            if e:
                f = power(i, e)
                term = f if term is None else term * f
        if term is None:
            items = [((0,) * len(target), c)]
        else:
            items = [(e2, c2 * c) for e2, c2 in term.terms.items()]
        for e2, v in items:
            s = acc.get(e2, 0) + v
            if s:
                acc[e2] = s
            else:
                acc.pop(e2, None)
    split = images[0].grading.split if images[0].grading.kind == "bihomogeneous" else None
    return SparsePoly._raw(target, acc, UNGRADED).regrade(split)


def matrix_det(matrix) -> Fraction:
    """Exact determinant of a square rational matrix by Gaussian elimination."""
    a = [[_as_fraction(v) for v in row] for row in matrix]
    n = len(a)
    det = Fraction(1)
    for k in range(n):
        piv = next((r for r in range(k, n) if a[r][k]), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        det *= a[k][k]
        for r in range(k + 1, n):
            f = a[r][k] / a[k][k]
            if f:
                for c in range(k, n):
                    a[r][c] -= f * a[k][c]
    return det


def poly_linear_change(p: SparsePoly, matrix, block: int | None = None) -> SparsePoly:
    """Substitute ``x_i -> sum_j M[i][j] x_j``.

    ``matrix`` is either full size, or the size of one bihomogeneous block;
    in the latter case ``block`` (0 or 1) selects the block, and ``None``
    applies the same matrix to both blocks.
    """
    m = [[_as_fraction(v) for v in row] for row in matrix]
    k = len(m)
    if any(len(row) != k for row in m):
        raise InputError("change-of-variables matrix is not square")
    if matrix_det(m) == 0:
        raise InputError("singular change-of-variables matrix")
    n = len(p.variables)
    gens = [SparsePoly.variable(p.variables, v) for v in p.variables]
    if k == n:
        index_blocks = [list(range(n))]
    else:
        if p.grading.kind != "bihomogeneous":
            raise InputError("matrix size does not match the variable count")
        s = p.grading.split
        blocks = [list(range(s)), list(range(s, n))]
        if block is not None:
            index_blocks = [blocks[block]]
        else:
            index_blocks = blocks
        if any(len(b) != k for b in index_blocks):
            raise InputError("matrix size does not match the block size")
    images = list(gens)
    for idx in index_blocks:
        for r, i in enumerate(idx):
            img = SparsePoly.zero(p.variables)
            for c, j in enumerate(idx):
                if m[r][c]:
                    img = img + gens[j].scale(m[r][c])
            images[i] = img
    out = poly_substitute(p, images)
    return SparsePoly._raw(out.variables, out.terms, p.grading)
