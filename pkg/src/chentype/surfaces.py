"""Surface charts and the JSON surface-spec format.

Every surface evaluates its position vector as a :class:`~chentype.jets.JetVec3`
of any requested order at a chart point ``(s, t)``.  Catalog charts are written
with jet arithmetic (exact sin/cos recurrences), and ruled surfaces
``x(s, t) = gamma(s) + t rho(s)`` take their curves from polynomial and
trigonometric terms, so every derivative is exact up to round-off.

Spec document::

    {"kind": "torus", "R": 2.0, "r": 1.0,
     "domain": {"s": [0, 6.28], "t": [-1.2, 1.2]}}

    {"kind": "ruled",
     "gamma": [{"type": "poly", "axis": 2, "coeff": 1.0, "freq_or_degree": 1}],
     "rho":   [{"type": "cos", "axis": 0, "coeff": 1.0, "freq_or_degree": 1},
               {"type": "sin", "axis": 1, "coeff": 1.0, "freq_or_degree": 1}]}

Graph surfaces ``(s, t, h(s, t))`` list monomials of ``h`` as
``{"coeff": c, "s": a, "t": b}``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import DomainError, SpecParseError
from .jets import Jet, JetVec3, Series, series_dot

__all__ = [
    "KINDS",
    "CurveTerm",
    "CurveEvaluator",
    "SurfaceSpec",
    "RuledNormalization",
    "sphere",
    "torus",
    "helicoid",
    "cylinder",
    "graph",
    "ruled",
    "evaluate_chart",
    "ruled_curves",
    "validate_ruled_normalization",
    "load_spec",
    "load_spec_file",
    "dump_spec",
    "sample_grid",
]

KINDS = ("sphere", "torus", "helicoid", "graph", "ruled", "cylinder")
TERM_TYPES = ("poly", "cos", "sin")
NORMALIZATION_TOL = 1e-9

_DEFAULT_DOMAINS = {
    "sphere": ((-3.0, 3.0), (-1.2, 1.2)),
    "torus": ((0.0, 2 * math.pi), (-1.2, 1.2)),
    "helicoid": ((-2.0, 2.0), (-2.0, 2.0)),
    "cylinder": ((-2.0, 2.0), (-2.0, 2.0)),
    "graph": ((-1.0, 1.0), (-1.0, 1.0)),
    "ruled": ((-1.0, 1.0), (-2.0, 2.0)),
}


@dataclass(frozen=True)
class CurveTerm:
    """One additive term ``coeff * s**deg`` / ``coeff * cos(freq s)`` / ``coeff * sin(freq s)``."""

    type: str
    axis: int
    coeff: float
    freq_or_degree: float

    def series(self, s0: float, order: int) -> Series:
        if self.type == "poly":
            d = int(self.freq_or_degree)
            c = np.zeros(order + 1)
            for k in range(min(d, order) + 1):
                c[k] = math.comb(d, k) * s0 ** (d - k)
            return Series(c * self.coeff, order)
        arg = Series.variable(s0, order) * float(self.freq_or_degree)
        base = arg.cos() if self.type == "cos" else arg.sin()
        return base * self.coeff

    def to_dict(self):
        deg = self.freq_or_degree
        if self.type == "poly":
            deg = int(deg)
        return {"type": self.type, "axis": self.axis, "coeff": self.coeff, "freq_or_degree": deg}


class CurveEvaluator:
    """Space curve returning a univariate series per component at ``s0``.

    Built either from :class:`CurveTerm` objects or from an arbitrary callback
    ``callback(s0, order) -> (Series, Series, Series)``.
    """

    def __init__(self, callback: Callable[[float, int], Sequence[Series]] | None = None, terms=()):
        self.terms = tuple(terms)
        if callback is None:
            callback = self._from_terms
        self.callback = callback

    @classmethod
    def from_terms(cls, terms: Sequence[CurveTerm]) -> "CurveEvaluator":
        return cls(terms=terms)

    def _from_terms(self, s0, order):
        comps = [Series.zero(order) for _ in range(3)]
        for term in self.terms:
            comps[term.axis] = comps[term.axis] + term.series(s0, order)
        return comps

    def __call__(self, s0: float, order: int) -> list[Series]:
        out = list(self.callback(s0, order))
        if len(out) != 3 or any(c.order != order for c in out):
            raise ValueError("curve callback must return three series of the requested order")
        if not all(np.all(np.isfinite(c.coeffs)) for c in out):
            raise ValueError(f"curve evaluation produced non-finite values at s={s0}")
        return out

    def value(self, s0: float) -> np.ndarray:
        return np.array([c.value for c in self(s0, 0)])

    def derivative_values(self, s0: float, k: int) -> np.ndarray:
        return np.array([c.coeffs[k] * math.factorial(k) for c in self(s0, k)])


@dataclass(frozen=True)
class SurfaceSpec:
    kind: str
    params: Mapping[str, float] = field(default_factory=dict)
    domain: tuple[tuple[float, float], tuple[float, float]] = ((-1.0, 1.0), (-1.0, 1.0))
    gamma: CurveEvaluator | None = None
    rho: CurveEvaluator | None = None
    poly: tuple[tuple[float, int, int], ...] = ()

    def contains(self, s: float, t: float) -> bool:
        (s0, s1), (t0, t1) = self.domain
        return s0 <= s <= s1 and t0 <= t <= t1

    @property
    def is_ruled(self) -> bool:
        return self.kind in ("ruled", "helicoid", "cylinder")

    def label(self) -> str:
        args = ", ".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.kind}({args})"


@dataclass(frozen=True)
class RuledNormalization:
    orthogonal: bool
    unit_ruling: bool
    unit_speed_ruling: bool
    orthogonal_violation: float
    unit_violation: float
    speed_violation: float
    tol: float

    @property
    def max_violation(self) -> float:
        return max(self.orthogonal_violation, self.unit_violation, self.speed_violation)

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tol

    def to_dict(self):
        return {
            "orthogonal": self.orthogonal,
            "unit_ruling": self.unit_ruling,
            "unit_speed_ruling": self.unit_speed_ruling,
            "orthogonal_violation": self.orthogonal_violation,
            "unit_violation": self.unit_violation,
            "speed_violation": self.speed_violation,
            "max_violation": self.max_violation,
            "tol": self.tol,
        }


def _domain(kind, domain):
    return tuple(tuple(float(v) for v in d) for d in (domain or _DEFAULT_DOMAINS[kind]))


def sphere(r: float = 1.0, domain=None) -> SurfaceSpec:
    return SurfaceSpec("sphere", {"r": float(r)}, _domain("sphere", domain))


def torus(R: float = 2.0, r: float = 1.0, domain=None) -> SurfaceSpec:
    return SurfaceSpec("torus", {"R": float(R), "r": float(r)}, _domain("torus", domain))


def helicoid(c: float = 1.0, domain=None) -> SurfaceSpec:
    return SurfaceSpec("helicoid", {"c": float(c)}, _domain("helicoid", domain))


def cylinder(r: float = 1.0, domain=None) -> SurfaceSpec:
    return SurfaceSpec("cylinder", {"r": float(r)}, _domain("cylinder", domain))


def graph(monomials: Sequence[tuple[float, int, int]], domain=None) -> SurfaceSpec:
    """Graph ``(s, t, sum coeff * s**a * t**b)``."""
    poly = tuple((float(c), int(a), int(b)) for c, a, b in monomials)
    return SurfaceSpec("graph", {}, _domain("graph", domain), poly=poly)


def ruled(gamma: CurveEvaluator | Sequence[CurveTerm], rho: CurveEvaluator | Sequence[CurveTerm], domain=None) -> SurfaceSpec:
    if not isinstance(gamma, CurveEvaluator):
        gamma = CurveEvaluator.from_terms(gamma)
    if not isinstance(rho, CurveEvaluator):
        rho = CurveEvaluator.from_terms(rho)
    return SurfaceSpec("ruled", {}, _domain("ruled", domain), gamma=gamma, rho=rho)


def ruled_curves(spec: SurfaceSpec) -> tuple[CurveEvaluator, CurveEvaluator]:
    """Directrix and ruling of a ruled-type spec (helicoid and cylinder included)."""
    if spec.kind == "ruled":
        return spec.gamma, spec.rho
    if spec.kind == "helicoid":
        c = spec.params["c"]
        gamma = [CurveTerm("poly", 2, c, 1)]
        rho = [CurveTerm("cos", 0, 1.0, 1.0), CurveTerm("sin", 1, 1.0, 1.0)]
    elif spec.kind == "cylinder":
        r = spec.params["r"]
        gamma = [CurveTerm("cos", 0, r, 1.0), CurveTerm("sin", 1, r, 1.0)]
        rho = [CurveTerm("poly", 2, 1.0, 0)]
    else:
        raise ValueError(f"{spec.kind} is not a ruled surface")
    return CurveEvaluator.from_terms(gamma), CurveEvaluator.from_terms(rho)


def _ruled_chart(gamma, rho, s0, t0, order):
    g = gamma(s0, order)
    r = rho(s0, order)
    t = Jet.variable("t", t0, order)
    comps = [gc.lift(order) + t * rc.lift(order) for gc, rc in zip(g, r)]
    return JetVec3(*comps)


def evaluate_chart(spec: SurfaceSpec, p: tuple[float, float], order: int) -> JetVec3:
    """Position-vector jet of ``spec`` at chart point ``p = (s, t)``."""
    s0, t0 = float(p[0]), float(p[1])
    if order < 0:
        raise ValueError("order must be non-negative")
    if not spec.contains(s0, t0):
        raise DomainError(f"point ({s0}, {t0}) outside domain {spec.domain} of {spec.label()}")
    if spec.kind == "ruled":
        return _ruled_chart(spec.gamma, spec.rho, s0, t0, order)
    s = Jet.variable("s", s0, order)
    t = Jet.variable("t", t0, order)
    P = spec.params
    if spec.kind == "sphere":
        r = P["r"]
        ct = t.cos()
        return JetVec3(ct * s.cos() * r, ct * s.sin() * r, t.sin() * r)
    if spec.kind == "torus":
        R, r = P["R"], P["r"]
        w = t.cos() * r + R
        return JetVec3(w * s.cos(), w * s.sin(), t.sin() * r)
    if spec.kind == "helicoid":
        return JetVec3(t * s.cos(), t * s.sin(), s * P["c"])
    if spec.kind == "cylinder":
        r = P["r"]
        return JetVec3(s.cos() * r, s.sin() * r, t)
    if spec.kind == "graph":
        h = Jet.zero(order)
        for c, a, b in spec.poly:
            h = h + (s**a) * (t**b) * c
        return JetVec3(s, t, h)
    raise ValueError(f"unknown surface kind {spec.kind!r}")


def sample_grid(domain, rows: int, cols: int, offset: float = 0.5) -> list[tuple[float, float]]:
    """Cell-centred ``rows x cols`` samples (``offset`` in cell units, 0 < offset < 1).

    Rows run along ``t`` and columns along ``s``; the order is row-major and fixed.
    """
    (s0, s1), (t0, t1) = domain
    ss = [s0 + (j + offset) * (s1 - s0) / cols for j in range(cols)]
    ts = [t0 + (i + offset) * (t1 - t0) / rows for i in range(rows)]
    return [(s, t) for t in ts for s in ss]


def validate_ruled_normalization(spec: SurfaceSpec, grid: Sequence[float] | None = None,
                                 tol: float = NORMALIZATION_TOL) -> RuledNormalization:
    """Report how far <gamma', rho> = 0, |rho| = 1 and |rho'| = 1 are violated on ``grid``.

    ``grid`` is a sequence of s-values (chart points are accepted too; their
    t coordinate is ignored).  Defaults to 17 equispaced s-values of the domain.
    """
    gamma, rho = ruled_curves(spec)
    if grid is None:
        (a, b), _ = spec.domain
        grid = np.linspace(a, b, 17)
    orth = unit = speed = 0.0
    for s in grid:
        s = float(s[0]) if isinstance(s, (tuple, list)) else float(s)
        g = gamma(s, 1)
        r = rho(s, 1)
        dg = [c.derivative() for c in g]
        dr = [c.derivative() for c in r]
        r0 = [c.truncate(0) for c in r]
        orth = max(orth, abs(series_dot(dg, r0).value))
        unit = max(unit, abs(series_dot(r0, r0).value - 1.0))
        speed = max(speed, abs(series_dot(dr, dr).value - 1.0))
    return RuledNormalization(orth <= tol, unit <= tol, speed <= tol, orth, unit, speed, tol)


# ---------------------------------------------------------------------------
# JSON spec format

_PARAMS = {
    "sphere": ("r",),
    "torus": ("R", "r"),
    "helicoid": ("c",),
    "cylinder": ("r",),
    "graph": ("h",),
    "ruled": ("gamma", "rho"),
}
_OPTIONAL = ("domain", "name", "description")


def _number(value, loc):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SpecParseError(f"expected a number, got {value!r}", loc)
    if not math.isfinite(value):
        raise SpecParseError("number must be finite", loc)
    return float(value)


def _positive(value, loc, name):
    v = _number(value, loc)
    if v <= 0:
        raise SpecParseError(f"{name} must be positive", loc)
    return v


def _parse_domain(doc, kind):
    if "domain" not in doc:
        return _DEFAULT_DOMAINS[kind]
    dom = doc["domain"]
    if not isinstance(dom, dict):
        raise SpecParseError("domain must be an object with keys s and t", "$.domain")
    out = []
    for key in ("s", "t"):
        loc = f"$.domain.{key}"
        iv = dom.get(key)
        if not isinstance(iv, list) or len(iv) != 2:
            raise SpecParseError("expected a two-element interval [a, b]", loc)
        a, b = _number(iv[0], f"{loc}[0]"), _number(iv[1], f"{loc}[1]")
        if not a < b:
            raise SpecParseError("interval must satisfy a < b", loc)
        out.append((a, b))
    return tuple(out)


def _parse_terms(items, loc):
    if not isinstance(items, list) or not items:
        raise SpecParseError("expected a non-empty list of curve terms", loc)
    terms = []
    for i, it in enumerate(items):
        tl = f"{loc}[{i}]"
        if not isinstance(it, dict):
            raise SpecParseError("curve term must be an object", tl)
        missing = [k for k in ("type", "axis", "coeff", "freq_or_degree") if k not in it]
        if missing:
            raise SpecParseError(f"missing parameter(s) {', '.join(missing)}", tl)
        if it["type"] not in TERM_TYPES:
            raise SpecParseError(f"unknown term type {it['type']!r}; expected one of {TERM_TYPES}", f"{tl}.type")
        axis = it["axis"]
        if isinstance(axis, bool) or axis not in (0, 1, 2):
            raise SpecParseError("axis must be 0, 1 or 2", f"{tl}.axis")
        coeff = _number(it["coeff"], f"{tl}.coeff")
        fd = _number(it["freq_or_degree"], f"{tl}.freq_or_degree")
        if it["type"] == "poly" and (fd < 0 or not fd.is_integer()):
            raise SpecParseError("polynomial degree must be a non-negative integer", f"{tl}.freq_or_degree")
        terms.append(CurveTerm(it["type"], int(axis), coeff, int(fd) if it["type"] == "poly" else fd))
    return terms


def _parse_graph(items):
    loc = "$.h"
    if not isinstance(items, list):
        raise SpecParseError("expected a list of monomials", loc)
    out = []
    for i, it in enumerate(items):
        ml = f"{loc}[{i}]"
        if not isinstance(it, dict) or not {"coeff", "s", "t"} <= set(it):
            raise SpecParseError("monomial needs coeff, s and t", ml)
        c = _number(it["coeff"], f"{ml}.coeff")
        a, b = _number(it["s"], f"{ml}.s"), _number(it["t"], f"{ml}.t")
        if a < 0 or b < 0 or not a.is_integer() or not b.is_integer():
            raise SpecParseError("exponents must be non-negative integers", ml)
        out.append((c, int(a), int(b)))
    return out


def load_spec(text: str | Mapping) -> SurfaceSpec:
    """Parse and validate a surface spec (JSON text or already-decoded mapping)."""
    if isinstance(text, (str, bytes)):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SpecParseError(f"malformed JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from None
    else:
        doc = text
    if not isinstance(doc, dict):
        raise SpecParseError("spec must be a JSON object")
    kind = doc.get("kind")
    if kind is None:
        raise SpecParseError("missing parameter kind")
    if kind not in KINDS:
        raise SpecParseError(f"unknown kind {kind!r}; expected one of {KINDS}", "$.kind")
    expected = _PARAMS[kind]
    for key in expected:
        if key not in doc:
            raise SpecParseError(f"missing parameter {key}", f"$.{key}")
    extra = set(doc) - set(expected) - set(_OPTIONAL) - {"kind"}
    if extra:
        raise SpecParseError(f"unexpected key(s) {sorted(extra)}", "$")
    domain = _parse_domain(doc, kind)
    if kind == "sphere":
        return sphere(_positive(doc["r"], "$.r", "r"), domain)
    if kind == "cylinder":
        return cylinder(_positive(doc["r"], "$.r", "r"), domain)
    if kind == "helicoid":
        c = _number(doc["c"], "$.c")
        if c == 0:
            raise SpecParseError("c must be nonzero", "$.c")
        return helicoid(c, domain)
    if kind == "torus":
        R = _positive(doc["R"], "$.R", "R")
        r = _positive(doc["r"], "$.r", "r")
        if not R > r:
            raise SpecParseError("torus needs R > r > 0", "$.R")
        return torus(R, r, domain)
    if kind == "graph":
        return graph(_parse_graph(doc["h"]), domain)
    gamma = _parse_terms(doc["gamma"], "$.gamma")
    rho = _parse_terms(doc["rho"], "$.rho")
    return ruled(gamma, rho, domain)


def load_spec_file(path) -> SurfaceSpec:
    with open(path, encoding="utf-8") as fh:
        return load_spec(fh.read())


def dump_spec(spec: SurfaceSpec) -> dict:
    """Inverse of :func:`load_spec` for term-based specs."""
    doc = {"kind": spec.kind}
    if spec.kind == "graph":
        doc["h"] = [{"coeff": c, "s": a, "t": b} for c, a, b in spec.poly]
    elif spec.kind == "ruled":
        if not (spec.gamma.terms and spec.rho.terms):
            raise ValueError("callback-based curves cannot be serialized")
        doc["gamma"] = [t.to_dict() for t in spec.gamma.terms]
        doc["rho"] = [t.to_dict() for t in spec.rho.terms]
    else:
        doc.update(spec.params)
    (a, b), (c, d) = spec.domain
    doc["domain"] = {"s": [a, b], "t": [c, d]}
    return doc
