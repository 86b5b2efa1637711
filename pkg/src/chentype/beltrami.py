"""Beltrami differential parameters of the fundamental forms I, II and III.

``beltrami_first(J, f, h)`` is the pairing ``a^{ij} f_i h_j`` and
``beltrami_second(J, f)`` the Laplacian ``-a^{ij} (f_ij - X^k_ij f_k)`` with
``a`` the selected form and ``X`` its Christoffel symbols.  Vector fields are
handled componentwise in ambient coordinates.

Gradients are ambient vectors: ``grad^I f = g^{ij} f_i x_j`` and
``grad^II f = b^{ij} f_i x_j`` push forward with the chart tangents, while
``grad^III f = e^{ij} f_i n_j`` pushes forward with the Gauss map, whose
induced metric is III.
"""

from __future__ import annotations

from enum import Enum
from typing import Union

import numpy as np

from .errors import InsufficientOrderError, ParabolicPointError
from .forms import (
    PARABOLIC_RTOL,
    ConnectionBundle,
    FormBundle,
    christoffel_trace_residual,
    codazzi_residual,
    curvature_log_derivative_residual,
    difference_tensor_sum_residual,
    t_tensor_identity_residual,
    values,
    weingarten_residual,
)
from .jets import Jet, JetVec3

__all__ = [
    "Form",
    "Field",
    "beltrami_first",
    "beltrami_grad",
    "beltrami_second",
    "identity_suite",
    "vector_residual",
    "IDENTITY_TOL",
]

IDENTITY_TOL = 1e-8

Field = Union[Jet, JetVec3]


class Form(str, Enum):
    I = "I"
    II = "II"
    III = "III"

    def __str__(self):
        return self.value


def _inverse_form(J, fb: FormBundle):
    J = Form(str(J))
    if J is Form.II:
        B = values(fb.b)
        det = B[0, 0] * B[1, 1] - B[0, 1] ** 2
        if abs(det) < PARABOLIC_RTOL * (1.0 + float(np.sum(B**2))):
            raise ParabolicPointError(f"det b = {det:.3e}; the II-operators are undefined at parabolic points")
    return fb.form(J)[1]


def _partials(f, order):
    return [f.partial(i).truncate(order) for i in range(2)]


def beltrami_first(J, f: Field, h: Field, fb: FormBundle) -> Field:
    """``a^{ij} f_i h_j`` for the inverse of form ``J``.

    Scalar-scalar gives a jet; scalar-vector (either way round) gives a vector.
    """
    if isinstance(f, JetVec3) and isinstance(h, JetVec3):
        raise TypeError("beltrami_first pairs at most one vector field with a scalar")
    if f.order < 1 or h.order < 1:
        raise InsufficientOrderError("first Beltrami parameter needs fields of order >= 1")
    inv = _inverse_form(J, fb)
    order = min(f.order - 1, h.order - 1, inv[0][0].order)
    fi = _partials(f, order)
    hj = _partials(h, order)
    a = [[inv[i][j].truncate(order) for j in range(2)] for i in range(2)]

    def term(i, j):
        # keep the scalar factor on the left of a vector product
        if isinstance(fi[i], JetVec3):
            return fi[i] * (a[i][j] * hj[j])
        return hj[j] * (a[i][j] * fi[i])

    return term(0, 0) + term(0, 1) + term(1, 0) + term(1, 1)


def beltrami_grad(J, f: Jet, fb: FormBundle) -> JetVec3:
    """Ambient gradient of a scalar field with respect to form ``J``."""
    target = fb.normal if str(J) == "III" else fb.x
    return beltrami_first(J, f, target, fb)


def _laplacian_scalar(f: Jet, inv, conn, order):
    """Laplacian jet and the largest base-point magnitude among its summands."""
    fi = [f.partial(i) for i in range(2)]
    fij = [[fi[i].partial(j).truncate(order) for j in range(2)] for i in range(2)]
    fi = [v.truncate(order) for v in fi]
    acc = Jet.zero(order)
    scale = 0.0
    for i in range(2):
        for j in range(i, 2):
            w = inv[i][j].truncate(order)
            mult = 1.0 if i == j else 2.0
            parts = [fij[i][j], conn[0][i][j].truncate(order) * fi[0], conn[1][i][j].truncate(order) * fi[1]]
            scale = max(scale, *(abs(mult * w.value * p.value) for p in parts))
            acc = acc + w * (parts[0] - parts[1] - parts[2]) * mult
    return -acc, scale


def beltrami_second(J, f: Field, fb: FormBundle, cb: ConnectionBundle, with_scale: bool = False):
    """Second Beltrami parameter ``-a^{ij} nabla^J_i f_j``, componentwise on vectors.

    The result has order ``min(f.order - 2, order of the J-connection)``.  With
    ``with_scale`` a pair ``(result, scale)`` is returned, ``scale`` being the
    largest base-point summand, so callers can tell cancellation from signal.
    """
    if f.order < 2:
        raise InsufficientOrderError("second Beltrami parameter needs a field of order >= 2")
    inv = _inverse_form(J, fb)
    conn = cb.for_form(Form(str(J)))
    order = min(f.order - 2, conn[0][0][0].order, inv[0][0].order)
    if isinstance(f, JetVec3):
        parts = [_laplacian_scalar(c, inv, conn, order) for c in f]
        out, scale = JetVec3(*(p[0] for p in parts)), max(p[1] for p in parts)
    else:
        out, scale = _laplacian_scalar(f, inv, conn, order)
    return (out, scale) if with_scale else out


def vector_residual(*terms) -> float:
    """``|sum(terms)| / max |term|`` on base-point values (vectors or scalars)."""
    vals = [np.atleast_1d(np.asarray(t.value if hasattr(t, "value") else t, dtype=float)) for t in terms]
    total = np.linalg.norm(sum(vals))
    scale = max(np.linalg.norm(v) for v in vals)
    if total == 0.0:
        return 0.0
    return float(total / scale) if scale > 0 else float("inf")


def identity_suite(fb: FormBundle, cb: ConnectionBundle, x: JetVec3) -> dict[str, float]:
    """Relative residuals of the classical identities linking I, II, III at one point.

    Keys:

    ``normal_pairing``       nabla^II(h, n) + grad^I h          (h = coordinate fields)
    ``position_pairing``     nabla^II(h, x) + grad^III h
    ``laplacian_position``   Delta^II x + grad^III(K)/(2K) + 2n
    ``laplacian_normal``     Delta^II n - grad^I(K)/(2K) - 2H n
    ``codazzi``              nabla_k b_ij - nabla_i b_jk
    ``difference_tensor_sum``  T~ + T
    ``curvature_log_derivative``  K_k/K - b_k/b + g_k/g
    ``difference_tensor_formula``  T, T~ against -1/2 b^{kr} nabla_r b_ij
    ``weingarten_third_form``  e - 2H b + K g
    ``christoffel_trace``    X^j_ij against d_i log|det| / 2
    """
    if x.order < 5:
        raise InsufficientOrderError(f"identity suite needs a position jet of order >= 5, got {x.order}")
    n = fb.normal
    out = {}
    out["normal_pairing"] = max(
        vector_residual(beltrami_first("II", h, n, fb), beltrami_grad("I", h, fb)) for h in x
    )
    out["position_pairing"] = max(
        vector_residual(beltrami_first("II", h, x, fb), beltrami_grad("III", h, fb)) for h in x
    )
    K = fb.K
    inv2K = 0.5 / K.value
    lap_x = beltrami_second("II", x, fb, cb)
    out["laplacian_position"] = vector_residual(
        lap_x, beltrami_grad("III", K, fb).value * inv2K, 2.0 * n.value
    )
    lap_n = beltrami_second("II", n, fb, cb)
    out["laplacian_normal"] = vector_residual(
        lap_n, -beltrami_grad("I", K, fb).value * inv2K, -2.0 * fb.H.value * n.value
    )
    out["codazzi"] = codazzi_residual(x, fb, cb)
    out["difference_tensor_sum"] = difference_tensor_sum_residual(cb)
    out["curvature_log_derivative"] = curvature_log_derivative_residual(fb)
    out["difference_tensor_formula"] = t_tensor_identity_residual(fb, cb)
    out["weingarten_third_form"] = weingarten_residual(fb)
    out["christoffel_trace"] = christoffel_trace_residual(fb, cb)
    return out
