"""Truncated Taylor-series (jet) arithmetic in one and two variables.

A bivariate :class:`Jet` of order ``N`` stores the scaled Taylor coefficients

    c[a, b] = 1/(a! b!) * d^(a+b) f / ds^a dt^b      (a + b <= N)

of a scalar field at an implicit base point, flattened in graded
lexicographic order: degree 0, then ``(1,0), (0,1)``, then ``(2,0), (1,1),
(0,2)`` and so on.  Truncating to a lower order is therefore a prefix slice.

:class:`Series` is the univariate counterpart used for curve data and for the
s-dependent coefficients of the ruled-surface engine.
"""

from __future__ import annotations

import functools
import math
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InsufficientOrderError, OrderMismatchError, SingularCompositionError

__all__ = [
    "Jet",
    "JetVec3",
    "Series",
    "compose",
    "jet_add",
    "jet_mul",
    "jet_partial",
    "match_order",
    "ncoeffs",
    "monomials",
    "DEGENERACY_RTOL",
]

DEGENERACY_RTOL = 1e-12

COMPOSABLE = ("sqrt", "reciprocal", "sin", "cos", "power")


def ncoeffs(order: int) -> int:
    return (order + 1) * (order + 2) // 2


def index(a: int, b: int) -> int:
    d = a + b
    return d * (d + 1) // 2 + b


@functools.lru_cache(maxsize=None)
def monomials(order: int) -> tuple[tuple[int, int], ...]:
    """Exponent pairs ``(a, b)`` in storage order."""
    return tuple((d - b, b) for d in range(order + 1) for b in range(d + 1))


@functools.lru_cache(maxsize=None)
def _product_plan(order):
    mons = monomials(order)
    out, left, right = [], [], []
    for i, (a1, b1) in enumerate(mons):
        d1 = a1 + b1
        for j, (a2, b2) in enumerate(mons):
            if d1 + a2 + b2 <= order:
                out.append(index(a1 + a2, b1 + b2))
                left.append(i)
                right.append(j)
    return np.array(out), np.array(left), np.array(right)


@functools.lru_cache(maxsize=None)
def _partial_plan(order, direction):
    # source indices and integer weights for d/ds or d/dt, result order - 1
    src, w = [], []
    for a, b in monomials(order - 1):
        if direction == 0:
            src.append(index(a + 1, b))
            w.append(a + 1)
        else:
            src.append(index(a, b + 1))
            w.append(b + 1)
    return np.array(src), np.array(w, dtype=float)


def _taylor_of(func: str, x0: float, order: int, p: float | None = None) -> np.ndarray:
    """Scaled derivatives f^(k)(x0)/k! for k = 0..order."""
    k = np.arange(order + 1)
    if func == "sin" or func == "cos":
        sn, cs = math.sin(x0), math.cos(x0)
        cycle = (sn, cs, -sn, -cs) if func == "sin" else (cs, -sn, -cs, sn)
        vals = np.array([cycle[j % 4] for j in range(order + 1)])
        return vals / np.array([math.factorial(j) for j in range(order + 1)], dtype=float)
    if func == "sqrt":
        p = 0.5
    elif func == "reciprocal":
        p = -1.0
    elif func != "power":
        raise ValueError(f"unknown univariate function {func!r}; expected one of {COMPOSABLE}")
    if p is None:
        raise ValueError("power composition needs an exponent")
    # generalized binomial coefficients binom(p, k) x0^(p-k)
    coef = np.empty(order + 1)
    c = 1.0
    for j in range(order + 1):
        coef[j] = 0.0 if c == 0.0 else c * x0 ** (p - j)
        c *= (p - j) / (j + 1)
    return coef


def _check_composable(func, x0, scale, p):
    tol = DEGENERACY_RTOL * (1.0 + scale)
    if func == "sqrt" and x0 <= tol:
        raise SingularCompositionError(func, x0)
    if func == "reciprocal" and abs(x0) < tol:
        raise SingularCompositionError(func, x0)
    if func == "power" and p is not None:
        integral = float(p).is_integer()
        if integral and p < 0 and abs(x0) < tol:
            raise SingularCompositionError(func, x0)
        if not integral and x0 <= tol:
            raise SingularCompositionError(func, x0)


class _Truncated:
    """Shared arithmetic for jets and series (flat coefficient vector + order)."""

    __slots__ = ("order", "_c")

    def __init__(self, coeffs, order):
        c = np.array(coeffs, dtype=float)
        if c.ndim != 1 or c.size != self._size(order):
            raise ValueError(f"expected {self._size(order)} coefficients for order {order}, got {c.size}")
        c.flags.writeable = False
        self.order = int(order)
        self._c = c

    @staticmethod
    def _size(order):
        raise NotImplementedError

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def value(self) -> float:
        return float(self._c[0])

    @classmethod
    def constant(cls, value, order):
        c = np.zeros(cls._size(order))
        c[0] = value
        return cls(c, order)

    @classmethod
    def zero(cls, order):
        return cls(np.zeros(cls._size(order)), order)

    def truncate(self, order: int):
        if order > self.order:
            raise InsufficientOrderError(f"cannot raise order {self.order} to {order}")
        if order == self.order:
            return self
        return type(self)(self._c[: self._size(order)], order)

    def _coerce(self, other):
        if isinstance(other, type(self)):
            if other.order != self.order:
                raise OrderMismatchError(f"order mismatch: {self.order} vs {other.order}")
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return type(self).constant(float(other), self.order)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return type(self)(self._c + other._c, self.order)

    __radd__ = __add__

    def __neg__(self):
        return type(self)(-self._c, self.order)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return type(self)(self._c - other._c, self.order)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return type(self)(self._c * float(other), self.order)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return type(self)(self._product(self._c, other._c, self.order), self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return type(self)(self._c / float(other), self.order)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * float(other)

    def __pow__(self, p):
        if isinstance(p, int) and p >= 0:
            out = type(self).constant(1.0, self.order)
            for _ in range(p):
                out = out * self
            return out
        return compose("power", self, p)

    def scale(self) -> float:
        return float(np.max(np.abs(self._c))) if self._c.size else 0.0

    def sqrt(self):
        return compose("sqrt", self)

    def reciprocal(self):
        return compose("reciprocal", self)

    def sin(self):
        return compose("sin", self)

    def cos(self):
        return compose("cos", self)

    def allclose(self, other, rtol=1e-12, atol=0.0) -> bool:
        return self.order == other.order and np.allclose(self._c, other._c, rtol=rtol, atol=atol)

    def __repr__(self):
        return f"{type(self).__name__}(order={self.order}, coeffs={np.array2string(self._c, precision=6)})"


class Jet(_Truncated):
    """Bivariate truncated Taylor expansion in the chart variables (s, t)."""

    __slots__ = ()

    @staticmethod
    def _size(order):
        return ncoeffs(order)

    @staticmethod
    def _product(u, v, order):
        out, left, right = _product_plan(order)
        return np.bincount(out, weights=u[left] * v[right], minlength=ncoeffs(order))

    @classmethod
    def variable(cls, which: str, value: float, order: int) -> "Jet":
        """The coordinate field ``s`` or ``t`` based at ``value``."""
        c = np.zeros(ncoeffs(order))
        c[0] = value
        if order >= 1:
            c[index(1, 0) if which == "s" else index(0, 1)] = 1.0
        return cls(c, order)

    @classmethod
    def from_dict(cls, terms: dict, order: int) -> "Jet":
        c = np.zeros(ncoeffs(order))
        for (a, b), v in terms.items():
            if a + b <= order:
                c[index(a, b)] = v
        return cls(c, order)

    def coeff(self, a: int, b: int) -> float:
        if a + b > self.order:
            raise InsufficientOrderError(f"coefficient ({a},{b}) beyond order {self.order}")
        return float(self._c[index(a, b)])

    def derivative(self, a: int, b: int) -> float:
        """The actual partial derivative d^(a+b) f / ds^a dt^b at the base point."""
        return self.coeff(a, b) * math.factorial(a) * math.factorial(b)

    def partial(self, direction) -> "Jet":
        return jet_partial(self, direction)

    def as_array(self) -> np.ndarray:
        """Square ``(N+1, N+1)`` view indexed ``[a, b]``, zero above the anti-diagonal."""
        out = np.zeros((self.order + 1, self.order + 1))
        for i, (a, b) in enumerate(monomials(self.order)):
            out[a, b] = self._c[i]
        return out


class Series(_Truncated):
    """Univariate truncated Taylor series; ``coeffs[k] = f^(k)(s0)/k!``."""

    __slots__ = ()

    @staticmethod
    def _size(order):
        return order + 1

    @staticmethod
    def _product(u, v, order):
        return np.convolve(u, v)[: order + 1]

    @classmethod
    def variable(cls, value, order):
        c = np.zeros(order + 1)
        c[0] = value
        if order >= 1:
            c[1] = 1.0
        return cls(c, order)

    def derivative(self) -> "Series":
        if self.order < 1:
            raise InsufficientOrderError("cannot differentiate an order-0 series")
        k = np.arange(1, self.order + 1)
        return Series(self._c[1:] * k, self.order - 1)

    def antiderivative(self, constant: float = 0.0) -> "Series":
        k = np.arange(1, self.order + 2)
        return Series(np.concatenate([[constant], self._c / k]), self.order + 1)

    def lift(self, order: int) -> Jet:
        """Embed as a bivariate jet in (s, t) that does not depend on t."""
        order = min(order, self.order)
        c = np.zeros(ncoeffs(order))
        for a in range(order + 1):
            c[index(a, 0)] = self._c[a]
        return Jet(c, order)


def compose(func: str, a, p: float | None = None):
    """Jet (or series) of ``func(a)`` by Horner evaluation of the shifted Taylor series.

    ``func`` is one of ``sqrt``, ``reciprocal``, ``sin``, ``cos``, ``power``
    (the latter with exponent ``p``).
    """
    if func not in COMPOSABLE:
        raise ValueError(f"unknown univariate function {func!r}; expected one of {COMPOSABLE}")
    x0 = a.value
    _check_composable(func, x0, a.scale(), p)
    d = _taylor_of(func, x0, a.order, p)
    cls = type(a)
    h = a - x0
    out = cls.constant(d[-1], a.order)
    for k in range(a.order - 1, -1, -1):
        out = out * h + d[k]
    return out


def jet_add(a: Jet, b: Jet) -> Jet:
    return a + b


def jet_mul(a: Jet, b: Jet) -> Jet:
    return a * b


def jet_partial(a: Jet, direction) -> Jet:
    """Partial derivative along ``"s"``/``0`` or ``"t"``/``1``; the order drops by one."""
    if direction in ("s", 0):
        d = 0
    elif direction in ("t", 1):
        d = 1
    else:
        raise ValueError(f"direction must be 's' or 't', got {direction!r}")
    if a.order < 1:
        raise InsufficientOrderError("partial derivative of an order-0 jet")
    src, w = _partial_plan(a.order, d)
    return Jet(a.coeffs[src] * w, a.order - 1)


def match_order(*items):
    """Truncate jets / jet vectors to their common minimum order."""
    m = min(it.order for it in items)
    return tuple(it.truncate(m) for it in items)


class JetVec3:
    """Ambient vector whose three components are jets of one order."""

    __slots__ = ("x", "y", "z")

    def __init__(self, x, y, z):
        if not (x.order == y.order == z.order):
            raise OrderMismatchError("JetVec3 components must share one order")
        self.x, self.y, self.z = x, y, z

    @classmethod
    def from_components(cls, comps: Sequence[Jet]) -> "JetVec3":
        x, y, z = match_order(*comps)
        return cls(x, y, z)

    @classmethod
    def constant(cls, vec, order):
        return cls(*(Jet.constant(float(v), order) for v in vec))

    @property
    def order(self) -> int:
        return self.x.order

    @property
    def components(self) -> tuple[Jet, Jet, Jet]:
        return (self.x, self.y, self.z)

    def __iter__(self):
        return iter((self.x, self.y, self.z))

    @property
    def value(self) -> np.ndarray:
        return np.array([self.x.value, self.y.value, self.z.value])

    def coeff_vector(self, a, b) -> np.ndarray:
        return np.array([c.coeff(a, b) for c in self])

    def truncate(self, order):
        return JetVec3(*(c.truncate(order) for c in self))

    def partial(self, direction):
        return JetVec3(*(jet_partial(c, direction) for c in self))

    def _map2(self, other, op):
        if isinstance(other, JetVec3):
            return JetVec3(*(op(p, q) for p, q in zip(self, other)))
        return NotImplemented

    def __add__(self, other):
        return self._map2(other, lambda p, q: p + q)

    def __sub__(self, other):
        return self._map2(other, lambda p, q: p - q)

    def __neg__(self):
        return JetVec3(-self.x, -self.y, -self.z)

    def __mul__(self, k):
        # scalar jet or number times vector
        if isinstance(k, JetVec3):
            return NotImplemented
        return JetVec3(self.x * k, self.y * k, self.z * k)

    __rmul__ = __mul__

    def __truediv__(self, k):
        return JetVec3(self.x / k, self.y / k, self.z / k)

    def dot(self, other: "JetVec3") -> Jet:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "JetVec3") -> "JetVec3":
        a, b = self, other
        return JetVec3(a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x)

    def norm(self) -> Jet:
        return self.dot(self).sqrt()

    def __repr__(self):
        return f"JetVec3(order={self.order}, value={self.value})"


def series_dot(u: Iterable[Series], v: Iterable[Series]) -> Series:
    terms = [p * q for p, q in zip(u, v)]
    return terms[0] + terms[1] + terms[2]


def series_cross(u: Sequence[Series], v: Sequence[Series]) -> list[Series]:
    return [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ]


def series_triple(u, v, w) -> Series:
    """Determinant ``(u, v, w) = <u x v, w>``."""
    return series_dot(series_cross(u, v), w)


def jet_of_function(f: Callable, s0: float, t0: float, order: int, lib=None):
    """Evaluate ``f(s, t)`` on jet arguments; ``f`` uses the jet-aware ``lib`` namespace."""
    s = Jet.variable("s", s0, order)
    t = Jet.variable("t", t0, order)
    return f(s, t, lib or JetMath)


class JetMath:
    """Minimal math namespace so one closed-form expression serves jets and floats."""

    sin = staticmethod(lambda a: a.sin())
    cos = staticmethod(lambda a: a.cos())
    sqrt = staticmethod(lambda a: a.sqrt())
