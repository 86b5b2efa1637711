"""Exact t-polynomial engine for the second-form Laplacian on ruled surfaces.

On a normalized ruled surface ``x = gamma(s) + t rho(s)`` (``<gamma', rho> = 0``,
``|rho| = |rho'| = 1``) the first two fundamental forms are

    I  = n ds^2 + dt^2,        II = (m ds^2 + 2A ds dt) / sqrt(n)
    n  = t^2 + 2 eta t + zeta,  m  = mu t^2 + nu t + xi,   A = (gamma', rho, rho')

and the second-form Laplacian (with the ``-b^{ij} nabla_i d_j`` sign and the
normal ``x_s x x_t``) reduces to

    Delta^II = (sqrt(n)/A) (-2 d_s d_t + (m/A) d_t^2 + (m_t/A) d_t).

Reversing the normal reverses ``b`` and therefore the operator; every entry
point takes ``orientation`` for that reason.

Fields are kept in the form ``g(t) / n^r`` with ``g`` a polynomial in ``t``
whose coefficients are s-series at a fixed base point ``s0`` and ``r`` a
half-integer stored as an integer count of halves.  Everything in ``t`` is
exact; ``s`` enters only through finitely many derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InsufficientOrderError, NormalizationError, ParabolicPointError
from .jets import Series, series_cross, series_dot, series_triple
from .surfaces import CurveEvaluator, NORMALIZATION_TOL

__all__ = [
    "TPoly",
    "RuledInvariants",
    "HalfPowerField",
    "HalfPowerVec3",
    "ruled_invariants",
    "position_field",
    "delta2_ruled",
    "p1_closed_form",
    "p1_printed_expansion",
    "degree_trace",
    "vanishing_analysis",
    "QUOTED_ORIENTATION",
    "crosscheck_residual",
    "forms_crosscheck_residual",
    "p1_expansion_discrepancy",
    "cubic_directrix_ruled",
    "random_ruled",
    "random_cubic_directrix",
    "random_rotation",
    "DEGREE_RTOL",
]

# The operator as usually quoted for ruled surfaces carries the opposite overall
# sign; it corresponds to the normal x_t x x_s (fixed by cross-validation).
QUOTED_ORIENTATION = -1
DEGREE_RTOL = 1e-10
A_RTOL = 1e-10


def _as_series(c, order):
    if isinstance(c, Series):
        return c
    return Series.constant(float(c), order)


class TPoly:
    """Polynomial in ``t`` with :class:`Series` coefficients (lowest power first).

    Binary operations truncate both operands to their common s-order.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Sequence[Series]):
        coeffs = list(coeffs)
        if not coeffs:
            raise ValueError("TPoly needs at least one coefficient")
        order = min(c.order for c in coeffs)
        self.coeffs = tuple(c.truncate(order) for c in coeffs)

    @property
    def order(self) -> int:
        return self.coeffs[0].order

    @property
    def length(self) -> int:
        return len(self.coeffs)

    def truncate(self, order):
        return TPoly([c.truncate(order) for c in self.coeffs])

    @staticmethod
    def _align(p, q):
        m = min(p.order, q.order)
        return p.truncate(m), q.truncate(m)

    def __add__(self, other):
        if not isinstance(other, TPoly):
            other = TPoly([_as_series(other, self.order)])
        p, q = self._align(self, other)
        n = max(p.length, q.length)
        zero = Series.zero(p.order)
        return TPoly([(p.coeffs[i] if i < p.length else zero) + (q.coeffs[i] if i < q.length else zero)
                      for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return TPoly([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return TPoly([c * float(other) for c in self.coeffs])
        if isinstance(other, Series):
            m = min(self.order, other.order)
            o = other.truncate(m)
            return TPoly([c.truncate(m) * o for c in self.coeffs])
        p, q = self._align(self, other)
        out = [Series.zero(p.order) for _ in range(p.length + q.length - 1)]
        for i, a in enumerate(p.coeffs):
            for j, b in enumerate(q.coeffs):
                out[i + j] = out[i + j] + a * b
        return TPoly(out)

    __rmul__ = __mul__

    def dt(self) -> "TPoly":
        if self.length == 1:
            return TPoly([Series.zero(self.order)])
        return TPoly([c * float(k) for k, c in enumerate(self.coeffs) if k > 0])

    def ds(self) -> "TPoly":
        if self.order < 1:
            raise InsufficientOrderError("s-series exhausted: cannot differentiate in s")
        return TPoly([c.derivative() for c in self.coeffs])

    def scale(self) -> float:
        return max(c.scale() for c in self.coeffs)

    @property
    def structural_degree(self) -> int:
        """Highest power whose coefficient series is not identically zero."""
        for k in range(self.length - 1, -1, -1):
            if np.any(self.coeffs[k].coeffs != 0.0):
                return k
        return 0

    def degree(self, rtol: float = DEGREE_RTOL) -> int:
        """Highest power whose coefficient series exceeds ``rtol`` times the largest coefficient."""
        scale = self.scale()
        if scale == 0.0:
            return 0
        for k in range(self.length - 1, -1, -1):
            if self.coeffs[k].scale() > rtol * scale:
                return k
        return 0

    def values(self) -> np.ndarray:
        """Coefficient values at ``s0`` (power order)."""
        return np.array([c.value for c in self.coeffs])

    def __call__(self, t: float) -> float:
        return float(np.polynomial.polynomial.polyval(t, self.values()))

    def divmod_monic(self, divisor: "TPoly") -> tuple["TPoly", "TPoly"]:
        """Long division by a polynomial whose leading coefficient is exactly 1."""
        p, d = self._align(self, divisor)
        dd = d.structural_degree
        lead = d.coeffs[dd]
        if not (lead.value == 1.0 and np.all(lead.coeffs[1:] == 0.0)):
            raise ValueError("divisor must be monic")
        rem = list(p.coeffs)
        if len(rem) - 1 < dd:
            return TPoly([Series.zero(p.order)]), TPoly(rem)
        quot = [Series.zero(p.order) for _ in range(len(rem) - dd)]
        for k in range(len(rem) - 1, dd - 1, -1):
            q = rem[k]
            quot[k - dd] = q
            for i in range(dd + 1):
                rem[k - dd + i] = rem[k - dd + i] - q * d.coeffs[i]
        return TPoly(quot), TPoly(rem[:dd] or [Series.zero(p.order)])


@dataclass(frozen=True)
class RuledInvariants:
    """Ruled-surface invariants as s-series at ``s0``.

    ``zeta = <g', g'>``, ``eta = <g', r'>``, ``mu = (r', r, r'')``,
    ``nu = (g', r, r'') + (r', r, g'')``, ``xi = (g', r, g'')``, ``A = (g', r, r')``
    with ``g = gamma`` and ``r = rho``; triple products are determinants.
    """

    s0: float
    zeta: Series
    eta: Series
    mu: Series
    nu: Series
    xi: Series
    A: Series
    gamma: tuple
    rho: tuple
    rhoPrime: tuple

    @property
    def order(self) -> int:
        return self.A.order

    def n(self) -> TPoly:
        return TPoly([self.zeta, self.eta * 2.0, Series.constant(1.0, self.order)])

    def m(self) -> TPoly:
        return TPoly([self.xi, self.nu, self.mu])

    def gauss_curvature(self, t: float) -> float:
        return -self.A.value**2 / self.n()(t) ** 2


def ruled_invariants(gamma: CurveEvaluator, rho: CurveEvaluator, s0: float, order: int,
                     tol: float = NORMALIZATION_TOL) -> RuledInvariants:
    """Compute ``zeta, eta, mu, nu, xi, A`` to s-order ``order`` from the two curves."""
    if order < 0:
        raise ValueError("order must be non-negative")
    g = gamma(s0, order + 2)
    r = rho(s0, order + 2)
    g1 = [c.derivative() for c in g]
    g2 = [c.derivative() for c in g1]
    r1 = [c.derivative() for c in r]
    r2 = [c.derivative() for c in r1]
    g0, g1, r0, r1 = ([c.truncate(order) for c in v] for v in (g, g1, r, r1))
    g2 = list(g2)
    r2 = list(r2)

    viol = max(abs(series_dot(g1, r0).value), abs(series_dot(r0, r0).value - 1.0),
               abs(series_dot(r1, r1).value - 1.0))
    if viol > tol:
        raise NormalizationError(f"ruling not normalized at s0={s0}: max violation {viol:.3e} > {tol:g}")

    zeta = series_dot(g1, g1)
    eta = series_dot(g1, r1)
    mu = series_triple(r1, r0, r2)
    nu = series_triple(g1, r0, r2) + series_triple(r1, r0, g2)
    xi = series_triple(g1, r0, g2)
    A = series_triple(g1, r0, r1)
    if abs(A.value) < A_RTOL * (1.0 + np.sqrt(abs(zeta.value))):
        raise ParabolicPointError(f"A = {A.value:.3e} at s0={s0}: K = -A^2/n^2 vanishes")
    return RuledInvariants(float(s0), zeta, eta, mu, nu, xi, A, tuple(g0), tuple(r0), tuple(r1))


@dataclass(frozen=True)
class HalfPowerField:
    """Scalar field ``numerator(t) / n(t)^(r2/2)``."""

    numerator: TPoly
    r2: int
    inv: RuledInvariants

    def __post_init__(self):
        if self.r2 < 0:
            raise ValueError("exponent must be non-negative")

    @property
    def exponent(self) -> Fraction:
        return Fraction(self.r2, 2)

    def degree(self, rtol=DEGREE_RTOL) -> int:
        return self.numerator.degree(rtol)

    def __call__(self, t: float) -> float:
        return self.numerator(t) / self.inv.n()(t) ** (self.r2 / 2)


@dataclass(frozen=True)
class HalfPowerVec3:
    """Ambient vector field whose components share one exponent."""

    components: tuple
    r2: int
    inv: RuledInvariants

    @property
    def exponent(self) -> Fraction:
        return Fraction(self.r2, 2)

    def degree(self, rtol=DEGREE_RTOL) -> int:
        scale = max(c.scale() for c in self.components)
        if scale == 0.0:
            return 0
        best = 0
        for c in self.components:
            for k in range(c.length - 1, -1, -1):
                if c.coeffs[k].scale() > rtol * scale:
                    best = max(best, k)
                    break
        return best

    def structural_degree(self) -> int:
        return max(c.structural_degree for c in self.components)

    def __call__(self, t: float) -> np.ndarray:
        nt = self.inv.n()(t)
        return np.array([c(t) for c in self.components]) / nt ** (self.r2 / 2)

    def coefficient_table(self) -> np.ndarray:
        """``table[p, i]`` = value at ``s0`` of the t^p coefficient of component ``i``."""
        d = max(c.length for c in self.components)
        out = np.zeros((d, 3))
        for i, c in enumerate(self.components):
            out[: c.length, i] = c.values()
        return out

    def normalized(self, rtol: float = 1e-9) -> tuple["HalfPowerVec3", float]:
        """Cancel one factor ``n`` from numerator and denominator.

        Returns the reduced field and the relative size of the discarded
        remainder, which must vanish for the reduction to be exact.
        """
        if self.r2 < 2:
            raise ValueError("no factor n left to cancel")
        n = self.inv.n()
        quots, worst = [], 0.0
        for c in self.components:
            q, r = c.divmod_monic(n)
            quots.append(q)
            sc = c.scale()
            if sc > 0:
                worst = max(worst, r.scale() / sc)
        if worst > rtol:
            raise ArithmeticError(f"numerator not divisible by n (relative remainder {worst:.3e})")
        return HalfPowerVec3(tuple(quots), self.r2 - 2, self.inv), worst


def position_field(inv: RuledInvariants) -> HalfPowerVec3:
    """``x = gamma + t rho`` as a degree-1 field with exponent 0."""
    comps = tuple(TPoly([g, r]) for g, r in zip(inv.gamma, inv.rho))
    return HalfPowerVec3(comps, 0, inv)


def _delta2_numerator(P: TPoly, r2: int, inv: RuledInvariants) -> TPoly:
    """Numerator of ``Delta^II (P / n^r)`` over ``n^(r + 3/2)``."""
    r = r2 / 2.0
    n = inv.n()
    n_t = n.dt()
    n_s = n.ds()
    m = inv.m()
    Ainv = inv.A.reciprocal()
    # f_t = G1 / n^(r+1)
    G1 = P.dt() * n - P * n_t * r
    # f_tt, f_st, f_t over n^(r+2)
    Ftt = G1.dt() * n - G1 * n_t * (r + 1)
    Fst = G1.ds() * n - G1 * n_s * (r + 1)
    Ft = G1 * n
    bracket = Fst * (-2.0) + Ftt * (m * Ainv) + Ft * (m.dt() * Ainv)
    return bracket * Ainv


def _sign(orientation):
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    return float(orientation)


def delta2_ruled(f, orientation: int = 1):
    """Apply the second-form Laplacian to ``g / n^r``; the exponent rises by exactly 3/2.

    ``f`` is a :class:`HalfPowerField` or :class:`HalfPowerVec3`.  Each
    application consumes one order of the s-series.
    """
    sign = _sign(orientation)
    if isinstance(f, HalfPowerVec3):
        comps = tuple(_delta2_numerator(c, f.r2, f.inv) * sign for c in f.components)
        m = min(c.order for c in comps)
        return HalfPowerVec3(tuple(c.truncate(m) for c in comps), f.r2 + 3, f.inv)
    if isinstance(f, HalfPowerField):
        return HalfPowerField(_delta2_numerator(f.numerator, f.r2, f.inv) * sign, f.r2 + 3, f.inv)
    raise TypeError("delta2_ruled expects a HalfPowerField or HalfPowerVec3")


def p1_closed_form(inv: RuledInvariants, orientation: int = 1) -> HalfPowerVec3:
    """``Delta^II x = P1 / sqrt(n)`` with ``P1 = orientation (n m_t rho - 2 A n rho') / A^2``."""
    sign = _sign(orientation)
    n = inv.n()
    mt = inv.m().dt()
    A = inv.A
    A2inv = (A * A).reciprocal()
    comps = []
    for r, rp in zip(inv.rho, inv.rhoPrime):
        comps.append(((n * mt) * r - (n * rp) * (A * 2.0)) * A2inv * sign)
    m = min(c.order for c in comps)
    return HalfPowerVec3(tuple(c.truncate(m) for c in comps), 1, inv)


def p1_printed_expansion(inv: RuledInvariants) -> HalfPowerVec3:
    """An expanded form of ``P1`` in circulation (normal ``x_t x x_s``), kept for comparison only.

    Coefficients: t^3: 2 mu rho; t^2: (4 mu eta + nu) rho + 2A rho';
    t^0: (2 zeta mu + 2 eta nu) rho + 4 eta A rho' + zeta eta rho + 2 zeta A rho'.
    """
    z, e, mu, nu, A = inv.zeta, inv.eta, inv.mu, inv.nu, inv.A
    A2inv = (A * A).reciprocal()
    comps = []
    for r, rp in zip(inv.rho, inv.rhoPrime):
        c3 = mu * r * 2.0
        c2 = (mu * e * 4.0 + nu) * r + A * rp * 2.0
        c0 = (z * mu * 2.0 + e * nu * 2.0) * r + e * A * rp * 4.0 + z * e * r + z * A * rp * 2.0
        comps.append(TPoly([c0, Series.zero(c0.order), c2, c3]) * A2inv)
    return HalfPowerVec3(tuple(comps), 1, inv)


def degree_trace(inv: RuledInvariants, k: int, orientation: int = 1) -> list[dict]:
    """Apply ``Delta^II`` to ``x`` ``k`` times and record degrees and exponents.

    Each entry carries the raw form produced by :func:`delta2_ruled` (exponent
    ``3j/2``) and the form with one factor ``n`` cancelled (exponent
    ``3j/2 - 1``), whose numerator degree is bounded by ``4j - 1``.  Entry 0 is
    ``x`` itself.  Raises ``AssertionError`` when a bound fails.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if inv.order < k + 1:
        raise InsufficientOrderError(f"s-order {inv.order} cannot carry {k} applications (need >= {k + 1})")
    f = position_field(inv)
    out = [{"k": 0, "degree": f.degree(), "exponent": Fraction(0), "raw_degree": f.degree(),
            "raw_exponent": Fraction(0), "degree_bound": 1, "remainder": 0.0}]
    prev_raw_deg, prev_raw_exp = f.structural_degree(), f.exponent
    for j in range(1, k + 1):
        f = delta2_ruled(f, orientation)
        raw_deg, raw_exp = f.structural_degree(), f.exponent
        reduced, rem = f.normalized()
        entry = {
            "k": j,
            "degree": reduced.degree(),
            "exponent": reduced.exponent,
            "raw_degree": raw_deg,
            "raw_exponent": raw_exp,
            "degree_bound": 4 * j - 1,
            "remainder": rem,
        }
        if raw_deg > prev_raw_deg + 4:
            raise AssertionError(f"step {j}: degree {raw_deg} exceeds previous {prev_raw_deg} + 4")
        if raw_exp - prev_raw_exp != Fraction(3, 2):
            raise AssertionError(f"step {j}: exponent increment {raw_exp - prev_raw_exp} != 3/2")
        if reduced.structural_degree() > 4 * j - 1:
            raise AssertionError(f"step {j}: reduced degree {reduced.structural_degree()} > {4 * j - 1}")
        if reduced.exponent != Fraction(3 * j, 2) - 1:
            raise AssertionError(f"step {j}: reduced exponent {reduced.exponent} != {Fraction(3 * j, 2) - 1}")
        out.append(entry)
        prev_raw_deg, prev_raw_exp = raw_deg, raw_exp
    return out


def vanishing_analysis(inv: RuledInvariants, orientation: int = 1) -> dict:
    """Show that ``P1`` cannot vanish identically.

    The rho'-coefficient of ``P1`` is ``-2n/A`` (times the orientation), a
    polynomial with leading coefficient ``+-2/A != 0``; as rho and rho' are
    orthonormal, ``P1 = 0`` would force it to vanish, i.e. ``2A rho' = m_t rho``.
    """
    n = inv.n()
    Ainv = inv.A.reciprocal()
    coeff = n * (Ainv * (-2.0 * _sign(orientation)))
    cross = series_cross(inv.rho, inv.rhoPrime)
    independence = float(np.sqrt(sum(c.value**2 for c in cross)))
    witness = coeff(0.0)
    p1 = p1_closed_form(inv, orientation)
    nonzero = bool(abs(coeff.values()[-1]) > 0 and independence > 0.5)
    return {
        "p1_nonzero": nonzero,
        "verdict": "P1 nonzero" if nonzero else "P1 may vanish",
        "rho_prime_coefficient": coeff.values().tolist(),
        "leading_coefficient": float(coeff.values()[-1]),
        "witness_t": 0.0,
        "witness_value": float(witness),
        "rho_rhoprime_cross_norm": independence,
        "rho_rhoprime_dot": float(series_dot(inv.rho, inv.rhoPrime).value),
        "p1_degree": p1.degree(),
    }


def _rel(a, b) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    d = float(np.linalg.norm(a - b))
    if d == 0.0:
        return 0.0
    return d / max(float(np.linalg.norm(a)), float(np.linalg.norm(b)))


def crosscheck_residual(spec, samples, orientation: int = 1, depth: int = 1) -> float:
    """Worst relative gap between this engine and the jet pipeline for ``(Delta^II)^j x``, ``j <= depth``.

    ``samples`` are chart points ``(s, t)``.
    """
    from .beltrami import beltrami_second
    from .forms import connections, fundamental_forms
    from .surfaces import evaluate_chart, ruled_curves

    gamma, rho = ruled_curves(spec)
    worst = 0.0
    for s0, t0 in samples:
        inv = ruled_invariants(gamma, rho, s0, depth + 1)
        x = evaluate_chart(spec, (s0, t0), 2 * depth + 3)
        fb = fundamental_forms(x, orientation=orientation)
        cb = connections(x, fb)
        f, h = position_field(inv), x
        for _ in range(depth):
            f = delta2_ruled(f, orientation)
            h = beltrami_second("II", h, fb, cb)
            worst = max(worst, _rel(f(t0), h.value))
    return worst


def forms_crosscheck_residual(spec, samples, orientation: int = 1) -> float:
    """Compare jet-computed ``g_ij, b_ij`` with ``n dt^2 + ...`` and ``(m, A; A, 0)/sqrt(n)``."""
    from .forms import fundamental_forms, values
    from .surfaces import evaluate_chart, ruled_curves

    gamma, rho = ruled_curves(spec)
    worst = 0.0
    for s0, t0 in samples:
        inv = ruled_invariants(gamma, rho, s0, 0)
        fb = fundamental_forms(evaluate_chart(spec, (s0, t0), 3), orientation=orientation)
        n, m, A = inv.n()(t0), inv.m()(t0), inv.A.value
        worst = max(worst, _rel(values(fb.g), [[n, 0.0], [0.0, 1.0]]),
                    _rel(values(fb.b), orientation * np.array([[m, A], [A, 0.0]]) / np.sqrt(n)))
    return worst


def p1_expansion_discrepancy(inv: RuledInvariants) -> dict:
    """Coefficient-wise gap between the expanded-polynomial form and the bracket form of ``P1``.

    Both are taken with the normal ``x_t x x_s`` under which the expansion is
    written.  ``per_power[p]`` is the largest component gap of the t^p
    coefficient at ``s0``.
    """
    bracket = p1_closed_form(inv, QUOTED_ORIENTATION).coefficient_table()
    printed = p1_printed_expansion(inv).coefficient_table()
    d = max(len(bracket), len(printed))
    B = np.zeros((d, 3))
    P = np.zeros((d, 3))
    B[: len(bracket)] = bracket
    P[: len(printed)] = printed
    gap = np.max(np.abs(B - P), axis=1)
    scale = max(float(np.max(np.abs(B))), 1e-300)
    return {
        "bracket": B.tolist(),
        "printed": P.tolist(),
        "per_power": gap.tolist(),
        "relative": float(np.max(gap) / scale),
        "agree": bool(np.max(gap) <= 1e-12 * scale),
    }


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    """Uniform rotation matrix from a QR factorization."""
    q, r = np.linalg.qr(rng.standard_normal((3, 3)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def cubic_directrix_ruled(coeffs=(1.0, 0.3, 0.2), R=None, domain=None):
    """``gamma = R (0, 0, p(s))``, ``rho = R (cos s, sin s, 0)`` with ``p = c1 s + c2 s^2 + c3 s^3``.

    Normalized for any rotation ``R``; ``A = p'(s)``, so ``p'`` must not vanish
    on the domain.
    """
    from .surfaces import CurveTerm, ruled

    R = np.eye(3) if R is None else np.asarray(R, dtype=float)
    gamma, rho = [], []
    for i in range(3):
        for k, c in enumerate(coeffs, start=1):
            if c != 0.0 and R[i, 2] != 0.0:
                gamma.append(CurveTerm("poly", i, float(R[i, 2] * c), k))
        rho.append(CurveTerm("cos", i, float(R[i, 0]), 1.0))
        rho.append(CurveTerm("sin", i, float(R[i, 1]), 1.0))
    return ruled(gamma, rho, domain)


def random_cubic_directrix(rng: np.random.Generator, domain=None):
    """Randomized :func:`cubic_directrix_ruled` whose ``p'`` has no real root."""
    c1 = rng.uniform(0.8, 1.2)
    c2 = rng.uniform(-0.4, 0.4)
    c3 = rng.uniform(0.1, 0.3)
    return cubic_directrix_ruled((c1, c2, c3), random_rotation(rng), domain), (c1, c2, c3)


def random_ruled(rng: np.random.Generator, domain=((-1.0, 1.0), (-2.0, 2.0))):
    """Random normalized ruled surface with non-vanishing ``A``.

    The ruling is a rotated small circle ``(a cos(s/a), a sin(s/a), sqrt(1-a^2))``
    (so ``mu != 0``) and ``gamma' = p(s) rho' + q(s) rho x rho'`` with random
    polynomials ``p`` and ``q > 0``, which gives ``eta = p`` and ``A = q``.
    ``gamma`` itself is integrated from 0 by Gauss-Legendre quadrature.
    """
    from .surfaces import ruled

    R = random_rotation(rng)
    a = rng.uniform(0.5, 0.95)
    h = np.sqrt(1.0 - a * a)
    pc = rng.uniform(-0.5, 0.5, size=3)
    qc = np.array([rng.uniform(0.6, 1.2), rng.uniform(-0.3, 0.3), rng.uniform(0.0, 0.4)])
    nodes, weights = np.polynomial.legendre.leggauss(40)

    def rho_series(s0, order):
        u = Series.variable(s0, order) * (1.0 / a)
        local = [u.cos() * a, u.sin() * a, Series.constant(h, order)]
        return [local[0] * R[i, 0] + local[1] * R[i, 1] + local[2] * R[i, 2] for i in range(3)]

    def poly_series(c, s0, order):
        s = Series.variable(s0, order)
        out = Series.constant(float(c[-1]), order)
        for ck in c[-2::-1]:
            out = out * s + float(ck)
        return out

    def dgamma(s0, order):
        r = rho_series(s0, order + 1)
        rp = [c.derivative() for c in r]
        r = [c.truncate(order) for c in r]
        b = series_cross(r, rp)
        p, q = poly_series(pc, s0, order), poly_series(qc, s0, order)
        return [rp[i] * p + b[i] * q for i in range(3)]

    def gamma_value(s0):
        x = 0.5 * s0 * (nodes + 1.0)
        vals = np.array([[c.value for c in dgamma(v, 0)] for v in x])
        return 0.5 * s0 * (weights @ vals)

    def gamma_series(s0, order):
        g0 = gamma_value(s0)
        if order == 0:
            return [Series.constant(v, 0) for v in g0]
        return [c.antiderivative(g0[i]) for i, c in enumerate(dgamma(s0, order - 1))]

    params = {"a": a, "p": pc.tolist(), "q": qc.tolist()}
    spec = ruled(CurveEvaluator(gamma_series), CurveEvaluator(rho_series), domain)
    return spec, params
