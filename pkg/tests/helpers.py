"""Random generators and sympy converters shared by the test modules."""

import random
from fractions import Fraction
from itertools import product

import sympy as sp

from surfdyn.mapio import MapFile, load_map
from surfdyn.polycore import SparsePoly
from surfdyn.surface import NSLattice

XYZ = ("x", "y", "z")
TW = ("t0", "t1", "w0", "w1")


def rand_poly(rng, variables, nterms=4, maxdeg=3, height=5, rational=False):
    terms = {}
    for _ in range(nterms):
        e = tuple(rng.randint(0, maxdeg) for _ in variables)
        c = rng.randint(-height, height)
        if rational:
            c = Fraction(c, rng.randint(1, 4))
        terms[e] = c
    return SparsePoly(variables, terms)


def rand_form(rng, variables, degree, height=3, density=0.7):
    terms = {}
    for e in monomials(len(variables), degree):
        if rng.random() < density:
            terms[e] = rng.randint(-height, height)
    return SparsePoly(variables, terms)


def rand_biform(rng, a, b, height=3, density=0.7):
    terms = {}
    for (i, j) in product(range(a + 1), range(b + 1)):
        if rng.random() < density:
            terms[(i, a - i, j, b - j)] = rng.randint(-height, height)
    return SparsePoly(TW, terms)


def monomials(n, d):
    if n == 1:
        return [(d,)]
    return [(k,) + rest for k in range(d, -1, -1) for rest in monomials(n - 1, d - k)]


def to_sympy(p):
    syms = sp.symbols(p.variables)
    return sp.Add(*[sp.Rational(c.numerator, c.denominator) * sp.Mul(*[s ** e for s, e in zip(syms, ex)])
                    for ex, c in p.terms.items()])


def from_sympy(expr, variables):
    poly = sp.Poly(sp.expand(expr), *sp.symbols(variables))
    return SparsePoly(variables, {m: Fraction(int(c.p), int(c.q)) for m, c in poly.terms()})


def rand_p2_map(rng, degree=2, height=3):
    """A random map of P2 given by forms with small integer coefficients."""
    while True:
        forms = [rand_form(rng, XYZ, degree, height) for _ in range(3)]
        if any(f.is_zero() for f in forms):
            continue
        mf = MapFile("P2", [f.render() for f in forms])
        try:
            return load_map(mf)
        except Exception:
            continue


def rand_p1p1_map(rng, bidegrees=((1, 1), (1, 1)), height=3):
    while True:
        comps = []
        for a, b in bidegrees:
            pair = [rand_biform(rng, a, b, height) for _ in range(2)]
            if any(p.is_zero() for p in pair):
                break
            comps.append([p.render() for p in pair])
        else:
            try:
                return load_map(MapFile("P1xP1", comps))
            except Exception:
                continue


def quadrant_lattice(n):
    ident = [[int(i == j) for j in range(n)] for i in range(n)]
    return NSLattice(n, ident, ident, [1] * n, "quadrant")


def rand_matrix(rng, n, lo=0, hi=5):
    return [[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)]


def seeded(seed):
    return random.Random(seed)
