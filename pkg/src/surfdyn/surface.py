"""Neron-Severi lattices: intersection form, nef cone and ample class."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, Sequence

from .errors import InputError, UnsupportedConeError


def _solve(matrix, rhs):
    """Exact solution of a square rational system, or None if singular."""
    n = len(matrix)
    a = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    for k in range(n):
        piv = next((r for r in range(k, n) if a[r][k]), None)
        if piv is None:
            return None
        a[k], a[piv] = a[piv], a[k]
        for r in range(n):
            if r != k and a[r][k]:
                f = a[r][k] / a[k][k]
                for c in range(k, n + 1):
                    a[r][c] -= f * a[k][c]
    return [a[i][n] / a[i][i] for i in range(n)]


def _inverse(matrix):
    n = len(matrix)
    cols = []
    for j in range(n):
        e = [1 if i == j else 0 for i in range(n)]
        col = _solve(matrix, e)
        if col is None:
            return None
        cols.append(col)
    return [[cols[j][i] for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class NSLattice:
    rank: int
    intersection_form: tuple
    nef_generators: tuple
    ample_ref: tuple
    name: str = "abstract"

    def __post_init__(self):
        form = tuple(tuple(int(v) for v in row) for row in self.intersection_form)
        gens = tuple(tuple(int(v) for v in g) for g in self.nef_generators)
        ample = tuple(int(v) for v in self.ample_ref)
        object.__setattr__(self, "intersection_form", form)
        object.__setattr__(self, "nef_generators", gens)
        object.__setattr__(self, "ample_ref", ample)
        r = self.rank
        if r < 1:
            raise InputError("lattice rank must be positive")
        if len(form) != r or any(len(row) != r for row in form):
            raise InputError("intersection form must be a rank x rank matrix")
        if any(form[i][j] != form[j][i] for i in range(r) for j in range(r)):
            raise InputError("intersection form must be symmetric")
        if any(len(g) != r for g in gens) or len(ample) != r:
            raise InputError("generator and ample vectors must have length rank")

    @classmethod
    def from_dict(cls, doc: Mapping) -> NSLattice:
        try:
            return cls(int(doc["rank"]), doc["form"], doc.get("nef_generators", ()),
                       doc["ample"], doc.get("name", "abstract"))
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed lattice document: {exc}") from None

    @classmethod
    def read(cls, path) -> NSLattice:
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {"rank": self.rank, "form": [list(r) for r in self.intersection_form],
                "nef_generators": [list(g) for g in self.nef_generators],
                "ample": list(self.ample_ref)}

    @cached_property
    def _generator_inverse(self):
        gens = self.nef_generators
        if len(gens) != self.rank:
            return None
        g = [[gens[j][i] for j in range(self.rank)] for i in range(self.rank)]
        return _inverse(g)

    def cone_coordinates(self, vec: Sequence) -> list:
        """Coordinates of ``vec`` in the basis of nef generators (simplicial cones only)."""
        inv = self._generator_inverse
        if inv is None:
            raise UnsupportedConeError(
                "nef cone is not simplicial; no exact membership test is available")
        return [sum(inv[i][j] * Fraction(vec[j]) for j in range(self.rank))
                for i in range(self.rank)]

    def divisor(self, coords) -> DivisorClass:
        return DivisorClass(self, tuple(Fraction(c) for c in coords))

    @property
    def ample(self) -> DivisorClass:
        return self.divisor(self.ample_ref)

    def pair(self, a: Sequence, b: Sequence) -> Fraction:
        form = self.intersection_form
        r = self.rank
        return sum(Fraction(a[i]) * form[i][j] * Fraction(b[j])
                   for i in range(r) for j in range(r) if form[i][j])


@dataclass(frozen=True)
class DivisorClass:
    lattice: NSLattice
    coords: tuple

    def __post_init__(self):
        if len(self.coords) != self.lattice.rank:
            raise InputError("class length does not match lattice rank")

    def __add__(self, other):
        _same_lattice(self, other)
        return DivisorClass(self.lattice, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __rmul__(self, c):
        return DivisorClass(self.lattice, tuple(Fraction(c) * a for a in self.coords))

    def self_intersection(self) -> Fraction:
        return intersect(self, self)


def _same_lattice(a: DivisorClass, b: DivisorClass):
    if a.lattice != b.lattice:
        raise InputError("classes live on different lattices")


P2_LATTICE = NSLattice(1, ((1,),), ((1,),), (1,), "P2")
# basis e1 = {t = const}, e2 = {w = const}; a bidegree-(a, b) curve has class a*e1 + b*e2
P1XP1_LATTICE = NSLattice(2, ((0, 1), (1, 0)), ((1, 0), (0, 1)), (1, 1), "P1xP1")


def builtin_lattice(surface: str) -> NSLattice:
    if surface == "P2":
        return P2_LATTICE
    if surface == "P1xP1":
        return P1XP1_LATTICE
    raise InputError(f"no built-in lattice for {surface!r}")


def intersect(a: DivisorClass, b: DivisorClass) -> Fraction:
    _same_lattice(a, b)
    return a.lattice.pair(a.coords, b.coords)


def is_nef(a: DivisorClass) -> bool:
    return all(c >= 0 for c in a.lattice.cone_coordinates(a.coords))


def hodge_index_check(a: DivisorClass, b: DivisorClass) -> bool:
    """Whether ``(a.b)^2 >= (a^2)(b^2)``; holds for every nef pair on a surface."""
    _same_lattice(a, b)
    return intersect(a, b) ** 2 >= intersect(a, a) * intersect(b, b)
