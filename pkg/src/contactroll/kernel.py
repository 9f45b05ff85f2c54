"""Arithmetic in complexified Euclidean 3-space.

Every function here works both on numpy arrays (leading axis of length 3, or
3x3 for matrices) and on array-valued :class:`~contactroll.jets.Jet` objects,
so the same formulas serve point values and Taylor jets.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateFrameError, NotInO3Error, SingularMatrixError
from .jets import Jet, stack

_P = [1, 2, 0]
_Q = [2, 0, 1]

#: relative determinant threshold for 3x3 inversion
SINGULAR_RTOL = 1e-13


def vec(x1, x2, x3):
    """Assemble a Cx3 from three scalars (numbers or scalar jets)."""
    if any(isinstance(c, Jet) for c in (x1, x2, x3)):
        return stack([x1, x2, x3])
    return np.array([x1, x2, x3], dtype=complex)


def dot(a, b):
    """Bilinear pairing a1*b1 + a2*b2 + a3*b3 (no conjugation)."""
    return (a * b).sum(axis=0)


def sqnorm(a):
    return dot(a, a)


def cross(a, b):
    return a[_P] * b[_Q] - a[_Q] * b[_P]


def triple(a, b, c):
    """a^T (b x c)."""
    return dot(a, cross(b, c))


def alpha(x):
    """The isometry of C^3 onto antisymmetric 3x3 matrices."""
    z = 0.0 * x[0]
    rows = [[z, -x[2], x[1]], [x[2], z, -x[0]], [-x[1], x[0], z]]
    if isinstance(x, Jet):
        return stack([stack(r) for r in rows])
    return np.array(rows, dtype=complex)


def _abs_max(a) -> float:
    c = a.c if isinstance(a, Jet) else np.asarray(a)
    return float(np.max(np.abs(c))) if c.size else 0.0


def alpha_inv(M, tol: float = 1e-10, value_only: bool = False):
    """Inverse of :func:`alpha`; raises :class:`NotInO3Error` on symmetric parts.

    With ``value_only`` only the point value of a jet is checked, for jets whose
    top-degree coefficients are unknown after differentiation.
    """
    sym = M + transpose(M)
    if value_only and isinstance(M, Jet):
        sym, M0 = sym.value, M.value
    else:
        M0 = M
    asym = _abs_max(sym)
    scale = max(_abs_max(M0), 1.0)
    if asym > tol * scale:
        raise NotInO3Error(asym)
    return vec(0.5 * (M[2, 1] - M[1, 2]), 0.5 * (M[0, 2] - M[2, 0]), 0.5 * (M[1, 0] - M[0, 1]))


def transpose(M):
    if isinstance(M, Jet):
        return M.T
    return np.swapaxes(np.asarray(M), 0, 1)


def matvec(M, x):
    if isinstance(M, Jet) or isinstance(x, Jet):
        return (M * x[None, :]).sum(axis=1)
    return np.asarray(M) @ np.asarray(x)


def matmul(A, B):
    if isinstance(A, Jet) or isinstance(B, Jet):
        return (A[:, :, None] * B[None, :, :]).sum(axis=1)
    return np.asarray(A) @ np.asarray(B)


def columns(c0, c1, c2):
    """Matrix with the given Cx3 columns."""
    if any(isinstance(c, Jet) for c in (c0, c1, c2)):
        return stack([c0, c1, c2]).T
    return np.stack([c0, c1, c2], axis=1).astype(complex)


def det(M):
    return triple(M[0], M[1], M[2])


def _row_scale(M) -> float:
    v = M.value if isinstance(M, Jet) else np.asarray(M)
    return float(np.max(np.sqrt(np.sum(np.abs(v) ** 2, axis=1))))


def inverse(M, error=SingularMatrixError):
    """3x3 inverse via the adjugate; scale-aware singularity guard."""
    d = det(M)
    d0 = d.value if isinstance(d, Jet) else d
    s = _row_scale(M)
    if abs(d0) < SINGULAR_RTOL * max(s, 1e-300) ** 3:
        if error is DegenerateFrameError:
            raise DegenerateFrameError(complex(d0))
        raise error(f"singular 3x3 matrix (det={complex(d0):.3e})")
    r0, r1, r2 = M[0], M[1], M[2]
    adj_cols = (cross(r1, r2), cross(r2, r0), cross(r0, r1))
    return columns(*adj_cols) / d


def rotation_from_frames(F0, F1):
    """The linear map R with R F0[i] = F1[i] for i = 0, 1, 2.

    ``F0`` and ``F1`` are sequences of three Cx3 vectors (the frame columns).
    """
    A0 = columns(*F0)
    A1 = columns(*F1)
    return matmul(A1, inverse(A0, error=DegenerateFrameError))


def identity(like=None):
    if isinstance(like, Jet):
        return Jet.constant(like.spec, np.eye(3))
    return np.eye(3, dtype=complex)
