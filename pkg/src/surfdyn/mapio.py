"""Polynomial expression parsing, map files, and report serialization.

Expression grammar (ASCII only, no implicit multiplication)::

    expr    := term (('+' | '-') term)*
    term    := factor ('*' factor)*
    factor  := atom ('^' uint)?
    atom    := rational | variable | parameter | '(' expr ')' | '-' factor
    rational:= int | int '/' posint

A leading minus binds looser than ``^`` so that ``-x^2`` means ``-(x^2)``;
this keeps :meth:`SparsePoly.render` output parseable.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InputError, ParseError
from .polycore import SparsePoly

P2_VARS = ("x", "y", "z")
P1P1_VARS = ("t0", "t1", "w0", "w1")
SURFACES = ("P2", "P1xP1")

_INT = re.compile(r"\d+")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _tokenize(text: str):
    tokens = []
    pos, n = 0, len(text)
    while pos < n:
        ch = text[pos]
        if not ch.isascii():
            raise ParseError("non-ASCII character", pos)
        if ch.isspace():
            pos += 1
        elif ch.isdigit():
            m = _INT.match(text, pos)
            tokens.append(("int", int(m.group()), pos))
            pos = m.end()
        elif ch.isalpha() or ch == "_":
            m = _NAME.match(text, pos)
            tokens.append(("name", m.group(), pos))
            pos = m.end()
        elif ch in "+-*/^()":
            tokens.append(("op", ch, pos))
            pos += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", pos)
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    def __init__(self, text, variables, parameters):
        self.tokens = _tokenize(text)
        self.i = 0
        self.variables = tuple(variables)
        self.parameters = parameters

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)

    def parse(self):
        p = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", pos)
        return p

    def expr(self):
        p = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                q = self.term()
                p = p + q if val == "+" else p - q
            else:
                return p

    def term(self):
        p = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.take()
                p = p * self.factor()
            else:
                return p

    def factor(self):
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "int":
                raise ParseError("exponent must be an unsigned integer", pos)
            return base ** val
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "int":
            k2, v2, _ = self.peek()
            if k2 == "op" and v2 == "/":
                self.take()
                k3, den, p3 = self.take()
                if k3 != "int":
                    raise ParseError("denominator must be an unsigned integer", p3)
                if den == 0:
                    raise ParseError("zero denominator", p3)
                return SparsePoly.constant(self.variables, Fraction(val, den))
            return SparsePoly.constant(self.variables, val)
        if kind == "name":
            if val in self.variables:
                return SparsePoly.variable(self.variables, val)
            if val in self.parameters:
                return SparsePoly.constant(self.variables, self.parameters[val])
            raise ParseError(f"unknown identifier {val!r}", pos)
        if kind == "op" and val == "(":
            p = self.expr()
            self.expect_op(")")
            return p
        if kind == "op" and val == "-":
            return -self.factor()
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {val!r}", pos)


def parse_rational(text) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    m = re.fullmatch(r"\s*(-?\d+)\s*(?:/\s*(\d+))?\s*", str(text))
    if not m:
        raise InputError(f"not a rational literal: {text!r}")
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise InputError(f"zero denominator in {text!r}")
    return Fraction(int(m.group(1)), den)


def parse_expression(text: str, variables: Sequence[str],
                     parameters: Mapping[str, Fraction] | None = None) -> SparsePoly:
    """Parse ``text`` into an exact polynomial over ``variables``."""
    params = {k: parse_rational(v) for k, v in (parameters or {}).items()}
    clash = set(params) & set(variables)
    if clash:
        raise InputError(f"parameter names shadow variables: {sorted(clash)}")
    return _Parser(text, variables, params).parse()


# -- map files --------------------------------------------------------------

@dataclass
class MapFile:
    surface: str
    components: list
    parameters: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, doc: Mapping) -> MapFile:
        if not isinstance(doc, Mapping):
            raise InputError("map file must be a JSON object")
        unknown = set(doc) - {"surface", "components", "parameters"}
        if unknown:
            raise InputError(f"unknown map-file fields: {sorted(unknown)}")
        surface = doc.get("surface")
        if surface not in SURFACES:
            raise InputError(f"surface must be one of {SURFACES}, got {surface!r}")
        comps = doc.get("components")
        if surface == "P2":
            if not (isinstance(comps, list) and len(comps) == 3
                    and all(isinstance(c, str) for c in comps)):
                raise InputError("P2 maps need a list of 3 expression strings")
        else:
            if not (isinstance(comps, list) and len(comps) == 2
                    and all(isinstance(pair, list) and len(pair) == 2
                            and all(isinstance(c, str) for c in pair) for pair in comps)):
                raise InputError("P1xP1 maps need two pairs of expression strings")
        params = doc.get("parameters") or {}
        if not isinstance(params, Mapping):
            raise InputError("parameters must be an object")
        return cls(surface, comps, {str(k): str(v) for k, v in params.items()})

    @classmethod
    def from_json(cls, text: str) -> MapFile:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.pos) from None
        return cls.from_dict(doc)

    @classmethod
    def read(cls, path) -> MapFile:
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())

    def to_dict(self) -> dict:
        doc = {"surface": self.surface, "components": self.components}
        if self.parameters:
            doc["parameters"] = dict(self.parameters)
        return doc

    def with_parameters(self, **overrides) -> MapFile:
        params = dict(self.parameters)
        params.update({k: str(v) for k, v in overrides.items()})
        return MapFile(self.surface, self.components, params)


def parse_components(mf: MapFile) -> tuple:
    """Parse and grade-check the raw components, without gcd cancellation.

    Returns a tuple of factors: one triple for P2, two pairs for P1xP1.
    """
    params = {k: parse_rational(v) for k, v in mf.parameters.items()}
    if mf.surface == "P2":
        polys = [parse_expression(c, P2_VARS, params) for c in mf.components]
        for k, p in enumerate(polys):
            if p.is_zero():
                raise InputError(f"component {k} is identically zero")
            if p.homogeneous_degree() is None:
                raise InputError(f"component {k} is not homogeneous")
        degs = {p.homogeneous_degree() for p in polys}
        if len(degs) != 1:
            raise InputError(f"components have different degrees {sorted(degs)}")
        if degs.pop() < 1:
            raise InputError("components must have degree at least 1")
        return (tuple(p.regrade() for p in polys),)
    factors = []
    for fi, pair in enumerate(mf.components):
        polys = [parse_expression(c, P1P1_VARS, params).regrade(2) for c in pair]
        for k, p in enumerate(polys):
            if p.is_zero():
                raise InputError(f"factor {fi} component {k} is identically zero")
            if p.grading.kind != "bihomogeneous":
                raise InputError(f"factor {fi} component {k} is not bihomogeneous")
        if polys[0].grading.degrees != polys[1].grading.degrees:
            raise InputError(f"factor {fi} components have different bidegrees")
        if sum(polys[0].grading.degrees) < 1:
            raise InputError(f"factor {fi} is constant")
        factors.append(tuple(polys))
    return tuple(factors)


def load_map(mf):
    """Parse a map file (``MapFile``, dict, or path) into a normalized map."""
    from .ratmap import normalize

    if isinstance(mf, Mapping):
        mf = MapFile.from_dict(mf)
    elif not isinstance(mf, MapFile):
        mf = MapFile.read(mf)
    return normalize(mf.surface, parse_components(mf))


# -- reports ------------------------------------------------------------------

@dataclass
class AnalysisReport:
    """Aggregated invariants of one map; every field is JSON-native."""

    surface: str
    algebraic_degree: int | None
    bidegree_matrix: list | None
    pullback_matrix: list
    char_poly: list
    spectral_radius: dict
    perron_vector: dict
    deg_top: int | None
    lambda_sq_vs_deg: dict
    is_regular_geometric: bool
    thm13_consistent: bool | None
    rank_f_star: int
    trace_f_star: int
    entropy_upper_bound_log: str | None
    degree_sequence: list
    stability_verified_up_to: int
    dynamical_degree: dict = field(default_factory=dict)
    rank_one: dict = field(default_factory=dict)
    projection_formula: dict = field(default_factory=dict)
    truncated: bool = False
    anomalies: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: Mapping) -> AnalysisReport:
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in doc.items() if k in names})


CSV_COLUMNS = ("n", "d11", "d12", "d21", "d22", "lambda_upper_n")


def degree_sequence_rows(surface: str, entries) -> list:
    """CSV rows for a degree sequence given as ``[{"n", "degree"|"matrix"}]``."""
    from .dynamics import nth_root_decimal  # circular at import time

    rows = []
    for entry in entries:
        n = entry["n"]
        if surface == "P2":
            d = entry["degree"]
            rows.append([n, d, "", "", "", nth_root_decimal(d, n)])
        else:
            (d11, d12), (d21, d22) = entry["matrix"]
            s = d11 + d12 + d21 + d22
            rows.append([n, d11, d12, d21, d22, nth_root_decimal(s, n)])
    return rows


def _render_table(report: AnalysisReport) -> str:
    doc = report.to_dict()
    width = max(len(k) for k in doc)
    lines = []
    for k, v in doc.items():
        if not isinstance(v, str):
            v = json.dumps(v, sort_keys=True)
        lines.append(f"{k.ljust(width)}  {v}")
    return "\n".join(lines) + "\n"


def emit_report(report: AnalysisReport, fmt: str = "json") -> bytes:
    """Serialize a report as ``table``, ``json`` or ``csv`` (degree sequence)."""
    if fmt == "json":
        return (json.dumps(report.to_dict(), indent=2, sort_keys=False) + "\n").encode("ascii")
    if fmt == "table":
        return _render_table(report).encode("ascii")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in degree_sequence_rows(report.surface, report.degree_sequence):
            w.writerow(row)
        return buf.getvalue().encode("ascii")
    raise InputError(f"unknown report format {fmt!r}")


def read_report(data) -> AnalysisReport:
    if isinstance(data, bytes):
        data = data.decode("ascii")
    return AnalysisReport.from_dict(json.loads(data))
