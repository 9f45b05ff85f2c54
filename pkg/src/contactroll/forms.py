"""Pointwise exterior calculus with scalar or Cx3 coefficients.

A form stores one coefficient per direction (``Form1``) or per ordered pair of
directions (``Form2``).  Coefficients are jets when derivatives are needed and
plain numbers or arrays otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from . import kernel as K
from .errors import ContactRollError
from .jets import Jet

SPACES = {"uv": ("u", "v"), "uvw": ("u", "v", "w")}


class FormError(ContactRollError):
    pass


def _pairs(space: str):
    d = SPACES[space]
    return [(d[i], d[j]) for i in range(len(d)) for j in range(i + 1, len(d))]


def _zero_like(x):
    return 0.0 * x


@dataclass
class Form1:
    coeffs: dict
    space: str = "uv"

    def __post_init__(self):
        if self.space not in SPACES:
            raise FormError(f"unknown parameter space {self.space!r}")
        missing = set(SPACES[self.space]) - set(self.coeffs)
        if missing:
            raise FormError(f"missing coefficients {sorted(missing)}")

    @property
    def dirs(self):
        return SPACES[self.space]

    def __getitem__(self, d):
        return self.coeffs[d]

    def map(self, f: Callable) -> "Form1":
        return Form1({d: f(self.coeffs[d]) for d in self.dirs}, self.space)

    def _zip(self, other, f):
        if isinstance(other, Form1):
            _check(self, other)
            return Form1({d: f(self.coeffs[d], other.coeffs[d]) for d in self.dirs}, self.space)
        return self.map(lambda c: f(c, other))

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self):
        return self.map(lambda a: -a)

    def __mul__(self, s):
        """Multiply every coefficient by a 0-form ``s`` (scalar on the left of vectors)."""
        return self.map(lambda a: s * a)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self.map(lambda a: a / s)

    def restrict(self, space: str = "uv") -> "Form1":
        return Form1({d: self.coeffs[d] for d in SPACES[space]}, space)


@dataclass
class Form2:
    coeffs: dict
    space: str = "uv"

    @property
    def pairs(self):
        return _pairs(self.space)

    def __getitem__(self, p):
        return self.coeffs[p]

    def map(self, f: Callable) -> "Form2":
        return Form2({p: f(self.coeffs[p]) for p in self.pairs}, self.space)

    def _zip(self, other, f):
        if isinstance(other, Form2):
            if other.space != self.space:
                raise FormError("forms live on different parameter spaces")
            return Form2({p: f(self.coeffs[p], other.coeffs[p]) for p in self.pairs}, self.space)
        return self.map(lambda c: f(c, other))

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self):
        return self.map(lambda a: -a)

    def __mul__(self, s):
        return self.map(lambda a: s * a)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self.map(lambda a: a / s)


def _check(a: Form1, b: Form1):
    if a.space != b.space:
        raise FormError("forms live on different parameter spaces")


_PAIRINGS = {
    "scalar": lambda x, y: x * y,
    "dot": K.dot,
    "cross": K.cross,
}


def wedge(a: Form1, b: Form1, pairing="scalar") -> Form2:
    """a ∧ b with the coefficient product given by ``pairing``.

    ``pairing`` is ``"scalar"``, ``"dot"``, ``"cross"`` or a bilinear callable.
    With ``"cross"`` this is the symmetric product a ×∧ b.
    """
    _check(a, b)
    f = _PAIRINGS[pairing] if isinstance(pairing, str) else pairing
    return Form2({(i, j): f(a[i], b[j]) - f(a[j], b[i]) for i, j in _pairs(a.space)}, a.space)


def cross_wedge(a: Form1, b: Form1) -> Form2:
    return wedge(a, b, "cross")


def sym_product(a: Form1, b: Form1, pairing="scalar") -> dict:
    """Symmetric product a ⊙ b; keys are direction pairs including repeats."""
    _check(a, b)
    f = _PAIRINGS[pairing] if isinstance(pairing, str) else pairing
    d = a.dirs
    out = {}
    for i in range(len(d)):
        for j in range(i, len(d)):
            out[(d[i], d[j])] = 0.5 * (f(a[d[i]], b[d[j]]) + f(a[d[j]], b[d[i]]))
    return out


def pair(a: Form1, v, pairing="dot") -> Form1:
    """Contract every coefficient of ``a`` with a fixed 0-form ``v`` (e.g. N^T a)."""
    f = _PAIRINGS[pairing] if isinstance(pairing, str) else pairing
    return a.map(lambda c: f(v, c))


def _require_jet(f):
    if not isinstance(f, Jet):
        raise FormError("exterior derivative needs a jet-valued coefficient")
    if f.spec.tables.max_degree < 1:
        raise FormError("insufficient jet order for an exterior derivative")


def ext_d(f, space: str = "uv"):
    """Exterior derivative of a 0-form (jet) or of a :class:`Form1`."""
    if isinstance(f, Form1):
        out = {}
        for i, j in _pairs(f.space):
            _require_jet(f[i])
            _require_jet(f[j])
            out[(i, j)] = f[j].diff(i) - f[i].diff(j)
        return Form2(out, f.space)
    _require_jet(f)
    return Form1({d: f.diff(d) for d in SPACES[space]}, space)


def _mag(x) -> float:
    if isinstance(x, Jet):
        x = x.value
    return float(np.max(np.abs(np.asarray(x)))) if np.size(x) else 0.0


def residual(terms: Iterable, combine: str = "form") -> tuple[float, float, float]:
    """Residual of the sum of ``terms`` as an (abs, scale, rel) triple.

    ``terms`` are forms (all of the same kind), dicts of coefficients, or
    plain 0-forms.  With ``combine="form"`` the relative residual is
    ``max_k |r_k| / (1 + s_k)``; with ``combine="ratio"`` it is ``|r| / s``.
    """
    terms = list(terms)
    first = terms[0]
    if isinstance(first, (Form1, Form2)):
        keys = list(first.coeffs)
        get = lambda t, k: t.coeffs[k]
    elif isinstance(first, dict):
        keys = list(first)
        get = lambda t, k: t[k]
    else:
        keys = [None]
        get = lambda t, k: t
    worst_abs = worst_scale = worst_rel = 0.0
    for k in keys:
        vals = [get(t, k) for t in terms]
        vals = [v.value if isinstance(v, Jet) else v for v in vals]
        r = sum(vals[1:], vals[0])
        a = _mag(r)
        s = sum(_mag(v) for v in vals)
        rel = a / (1.0 + s) if combine == "form" else (a / s if s > 0 else a)
        if rel >= worst_rel:
            worst_abs, worst_scale, worst_rel = a, s, rel
    return worst_abs, worst_scale, worst_rel


def fund_identity_residual(a, b, om1: Form1, om2: Form1):
    """Residual forms of both equalities of the fundamental wedge identity.

    Returns ``(lhs, rhs1, rhs2)``; both ``lhs - rhs1`` and ``lhs - rhs2`` vanish.
    """
    axb = K.cross(a, b)
    lhs = wedge(pair(om1, a), pair(om2, b))
    inner = om1.map(lambda c: K.cross(axb, c) + K.dot(b, c) * a)
    rhs1 = wedge(inner, om2, "dot")
    rhs2 = pair_form2(cross_wedge(om1, om2), axb) + wedge(pair(om1, b), pair(om2, a))
    return lhs, rhs1, rhs2


def pair_form2(f: Form2, v) -> Form2:
    return f.map(lambda c: K.dot(v, c))


def ratio(num: Form2, den: Form2, pair_key=("u", "v")):
    """Quotient of two 2-forms on (u, v) (a 0-form)."""
    return num[pair_key] / den[pair_key]
