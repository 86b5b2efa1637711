"""Fundamental forms, Christoffel symbols and difference tensors from position jets.

Indices run over ``(1, 2) = (s, t)`` and are stored zero-based.  The unit
normal is ``orientation * (x_s x x_t) / |x_s x x_t|`` with ``orientation = +1``
by default; ``b``, ``H`` and everything downstream that depends on ``b``'s
sign flips with it.

Identity residuals are relative: the norm of the residual divided by the
largest magnitude among the terms that make up the identity.  Where every
term can vanish together (symmetric points), a per-unit-chart-parameter floor
joins the scale: ``|b|`` for derivatives of ``b``, 1 for Christoffel-type
quantities.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InsufficientOrderError, ParabolicPointError, RegularityError, SingularCompositionError
from .jets import Jet, JetVec3

__all__ = [
    "FormBundle",
    "ConnectionBundle",
    "fundamental_forms",
    "connections",
    "christoffel",
    "covariant_derivative",
    "codazzi_residual",
    "t_tensor_identity_residual",
    "difference_tensor_sum_residual",
    "weingarten_residual",
    "curvature_log_derivative_residual",
    "christoffel_trace_residual",
    "relative_residual",
    "PARABOLIC_RTOL",
    "REGULARITY_TOL",
]

PARABOLIC_RTOL = 1e-10
REGULARITY_TOL = 1e-12

Matrix2 = list  # 2x2 nested list of Jets
Tensor3 = list  # [k][i][j] nested list of Jets


def _sym(a11, a12, a22):
    return [[a11, a12], [a12, a22]]


def _inverse(a):
    det = a[0][0] * a[1][1] - a[0][1] * a[0][1]
    inv_det = det.reciprocal()
    return _sym(a[1][1] * inv_det, -a[0][1] * inv_det, a[0][0] * inv_det), det


def _trunc(m, order):
    if isinstance(m, list):
        return [_trunc(v, order) for v in m]
    return m.truncate(order)


def values(tensor) -> np.ndarray:
    """Base-point values of a nested list of jets."""
    if isinstance(tensor, list):
        return np.array([values(v) for v in tensor])
    if isinstance(tensor, JetVec3):
        return tensor.value
    return tensor.value


def relative_residual(residual, *terms) -> float:
    r = float(np.max(np.abs(np.asarray(residual, dtype=float))))
    scale = max((float(np.max(np.abs(np.asarray(t, dtype=float)))) for t in terms), default=0.0)
    if r == 0.0:
        return 0.0
    return r / scale if scale > 0 else float("inf")


@dataclass(frozen=True)
class FormBundle:
    """First, second and third fundamental forms with inverses and curvatures.

    Orders for a position jet of order ``N``: tangents, ``g``, ``normal`` are
    ``N - 1``; ``b``, ``e``, normal derivatives, ``K``, ``H`` are ``N - 2``.
    """

    x: JetVec3
    xu: tuple  # (x_s, x_t)
    normal: JetVec3
    nu: tuple  # (n_s, n_t)
    g: Matrix2
    b: Matrix2
    e: Matrix2
    gInv: Matrix2
    bInv: Matrix2
    eInv: Matrix2
    detg: Jet
    detb: Jet
    dete: Jet
    K: Jet
    H: Jet
    orientation: int = 1

    @property
    def order(self) -> int:
        return self.x.order

    def form(self, J):
        J = str(J)
        return {"I": (self.g, self.gInv), "II": (self.b, self.bInv), "III": (self.e, self.eInv)}[J]


@dataclass(frozen=True)
class ConnectionBundle:
    """Christoffel symbols of I, II, III and the difference tensors.

    Every array is indexed ``[k][i][j]`` for the symbol ``X^k_ij``.
    """

    Gamma: Tensor3
    Pi: Tensor3
    Lambda: Tensor3
    T: Tensor3
    Ttilde: Tensor3

    def for_form(self, J):
        return {"I": self.Gamma, "II": self.Pi, "III": self.Lambda}[str(J)]


def fundamental_forms(x: JetVec3, orientation: int = 1, check_parabolic: bool = True) -> FormBundle:
    """Compute I, II, III, the unit normal, K and H from a position jet of order >= 3."""
    if x.order < 3:
        raise InsufficientOrderError(f"fundamental forms need a position jet of order >= 3, got {x.order}")
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    xs, xt = x.partial("s"), x.partial("t")
    cross = xs.cross(xt)
    norm2 = cross.dot(cross)
    if np.sqrt(max(norm2.value, 0.0)) < REGULARITY_TOL:
        raise RegularityError(f"x_s x x_t vanishes at the base point (|.|^2 = {norm2.value:.3e})")
    n = cross * (norm2.sqrt().reciprocal() * float(orientation))

    g = _sym(xs.dot(xs), xs.dot(xt), xt.dot(xt))
    xss, xst, xtt = xs.partial("s"), xs.partial("t"), xt.partial("t")
    n2 = n.truncate(x.order - 2)
    b = _sym(n2.dot(xss), n2.dot(xst), n2.dot(xtt))
    ns, nt = n.partial("s"), n.partial("t")
    e = _sym(ns.dot(ns), ns.dot(nt), nt.dot(nt))

    bvals = values(b)
    detb_val = bvals[0, 0] * bvals[1, 1] - bvals[0, 1] ** 2
    if check_parabolic and abs(detb_val) < PARABOLIC_RTOL * (1.0 + float(np.sum(bvals**2))):
        raise ParabolicPointError(f"det b = {detb_val:.3e} at the base point (parabolic point, K = 0)")

    gInv, detg = _inverse(g)
    bInv, detb = _inverse(b)
    try:
        eInv, dete = _inverse(e)
    except SingularCompositionError:
        # det e = K^2 det g: the third form degenerates as K -> 0
        raise ParabolicPointError("third fundamental form is degenerate (K nearly 0)") from None
    m = x.order - 2
    gInvm = _trunc(gInv, m)
    K = detb / detg.truncate(m)
    H = (gInvm[0][0] * b[0][0] + gInvm[0][1] * b[0][1] * 2.0 + gInvm[1][1] * b[1][1]) * 0.5
    return FormBundle(x, (xs, xt), n, (ns, nt), g, b, e, gInv, bInv, eInv, detg, detb, dete, K, H, orientation)


def christoffel(a: Matrix2, aInv: Matrix2) -> Tensor3:
    """Christoffel symbols of the second kind of the (possibly indefinite) metric ``a``."""
    order = a[0][0].order - 1
    da = [[[a[i][j].partial(r) for j in range(2)] for i in range(2)] for r in range(2)]  # da[r][i][j]
    inv = _trunc(aInv, order)
    out = [[[None] * 2 for _ in range(2)] for _ in range(2)]
    for k in range(2):
        for i in range(2):
            for j in range(i, 2):
                acc = Jet.zero(order)
                for r in range(2):
                    acc = acc + inv[k][r] * (da[j][i][r] + da[i][j][r] - da[r][i][j])
                out[k][i][j] = out[k][j][i] = acc * 0.5
    return out


def connections(x: JetVec3, fb: FormBundle) -> ConnectionBundle:
    """Christoffel symbols of all three forms and ``T = Gamma - Pi``, ``T~ = Lambda - Pi``."""
    if x.order < 4:
        raise InsufficientOrderError(f"connections need a position jet of order >= 4, got {x.order}")
    Gamma = christoffel(fb.g, fb.gInv)
    Pi = christoffel(fb.b, fb.bInv)
    Lam = christoffel(fb.e, fb.eInv)
    m = Pi[0][0][0].order
    G = _trunc(Gamma, m)
    T = [[[G[k][i][j] - Pi[k][i][j] for j in range(2)] for i in range(2)] for k in range(2)]
    Tt = [[[Lam[k][i][j] - Pi[k][i][j] for j in range(2)] for i in range(2)] for k in range(2)]
    return ConnectionBundle(Gamma, Pi, Lam, T, Tt)


def covariant_derivative(a: Matrix2, conn: Tensor3):
    """Base-point values of ``nabla_k a_ij`` plus every constituent term (for scaling).

    Returns ``(D, terms)`` with ``D[k, i, j]`` and ``terms`` a list of arrays.
    """
    A = values(a)
    C = values(conn)
    dA = np.array([[[a[i][j].partial(k).value for j in range(2)] for i in range(2)] for k in range(2)])
    t1 = np.einsum("lki,lj->kij", C, A)
    t2 = np.einsum("lkj,il->kij", C, A)
    return dA - t1 - t2, [dA, t1, t2]


def codazzi_residual(x: JetVec3, fb: FormBundle, cb: ConnectionBundle) -> float:
    """Relative residual of ``nabla_k b_ij - nabla_i b_jk`` (Levi-Civita of I)."""
    D, terms = covariant_derivative(fb.b, cb.Gamma)
    res = D - np.transpose(D, (2, 0, 1))
    return relative_residual(res, values(fb.b), *terms)


def _t_formula(fb, conn):
    D, _ = covariant_derivative(fb.b, conn)
    return -0.5 * np.einsum("kr,rij->kij", values(fb.bInv), D)


def t_tensor_identity_residual(fb: FormBundle, cb: ConnectionBundle) -> float:
    """Compare ``T`` and ``T~`` with ``-1/2 b^{kr} nabla_r b_ij`` under I and III."""
    worst = 0.0
    for diff, conn in ((cb.T, cb.Gamma), (cb.Ttilde, cb.Lambda)):
        rhs = _t_formula(fb, conn)
        lhs = values(diff)
        worst = max(worst, relative_residual(lhs - rhs, 1.0, values(conn), values(cb.Pi), rhs))
    return worst


def difference_tensor_sum_residual(cb: ConnectionBundle) -> float:
    """``T~ + T`` should vanish; scaled by the Christoffel symbols involved."""
    return relative_residual(values(cb.T) + values(cb.Ttilde),
                             1.0, values(cb.Gamma), values(cb.Pi), values(cb.Lambda))


def weingarten_residual(fb: FormBundle) -> float:
    """``e_ij - (2H b_ij - K g_ij)`` at the base point."""
    E, B, G = values(fb.e), values(fb.b), values(fb.g)
    H, K = fb.H.value, fb.K.value
    return relative_residual(E - 2 * H * B + K * G, E, 2 * H * B, K * G)


def curvature_log_derivative_residual(fb: FormBundle) -> float:
    """``K_k/K - b_k/b + g_k/g`` for ``k = s, t``."""
    terms = []
    for det in (fb.K, fb.detb, fb.detg):
        terms.append(np.array([det.partial(k).value for k in range(2)]) / det.value)
    res = terms[0] - terms[1] + terms[2]
    return relative_residual(res, *terms)


def christoffel_trace_residual(fb: FormBundle, cb: ConnectionBundle) -> float:
    """Contracted symbols against log-derivatives of the determinants."""
    worst = 0.0
    for conn, det in ((cb.Gamma, fb.detg), (cb.Pi, fb.detb), (cb.Lambda, fb.dete)):
        C = values(conn)
        trace = np.einsum("jij->i", C)
        rhs = np.array([det.partial(i).value for i in range(2)]) / (2 * det.value)
        worst = max(worst, relative_residual(trace - rhs, trace, rhs, C))
    return worst
