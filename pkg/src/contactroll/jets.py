"""Truncated multivariate Taylor arithmetic ("jets") over complex scalars.

A :class:`Jet` stores the Taylor coefficients (partials divided by factorials)
of a function at a point, densely, over the lattice of multi-indices allowed by
a :class:`JetSpec`.  The spec caps the degree of every variable and, optionally,
the total degree of groups of variables, so that e.g. an order-6 jet in
``(u, v, w)`` can be combined with a cheap order-2 block in auxiliary unknowns.

Jets may be array valued: the coefficient array has shape ``(*shape, n)`` with
the coefficient axis last, so a ``Cx3`` field is a jet of shape ``(3,)`` and a
rotation field a jet of shape ``(3, 3)``.

Truncation only ever discards information upward: the coefficient of a
multi-index ``k`` in any product depends only on coefficients of multi-indices
``<= k``.  Differentiating therefore leaves every lower coefficient exact; it is
the caller's job to ask only for orders that survived the differentiations it
performed.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import JetBranchPointError, JetError, JetPoleError

#: values with modulus below this are treated as poles / branch points
ZERO_THRESHOLD = 1e-14


@dataclass(frozen=True)
class JetSpec:
    """Variables and degree caps of a family of jets.

    ``blocks`` is a tuple of ``(variable_indices, total_cap)`` pairs; within
    each block the total degree is capped in addition to the per-variable caps.
    """

    names: tuple[str, ...]
    caps: tuple[int, ...]
    blocks: tuple[tuple[tuple[int, ...], int], ...] = ()

    def __post_init__(self):
        if len(self.names) != len(self.caps):
            raise JetError("names and caps differ in length")
        if len(set(self.names)) != len(self.names):
            raise JetError("duplicate variable names")
        if any(c < 0 for c in self.caps):
            raise JetError("negative degree cap")
        if len(self.names) > 7:
            raise JetError("at most 7 jet variables are supported")

    @classmethod
    def total(cls, names: Sequence[str], order: int) -> "JetSpec":
        """All variables in one block of total degree ``order``."""
        names = tuple(names)
        k = len(names)
        return cls(names, (order,) * k, ((tuple(range(k)), order),))

    @classmethod
    def product(cls, *groups: tuple[Sequence[str], int]) -> "JetSpec":
        """Concatenate total-degree blocks, e.g. ``((("u","v","w"), 3), (("c1","c2"), 2))``."""
        names: list[str] = []
        caps: list[int] = []
        blocks = []
        for gnames, order in groups:
            start = len(names)
            names.extend(gnames)
            caps.extend([order] * len(gnames))
            blocks.append((tuple(range(start, start + len(gnames))), order))
        return cls(tuple(names), tuple(caps), tuple(blocks))

    @property
    def nvars(self) -> int:
        return len(self.names)

    def var_index(self, var: int | str) -> int:
        if isinstance(var, str):
            try:
                return self.names.index(var)
            except ValueError:
                raise JetError(f"unknown jet variable {var!r}") from None
        if not 0 <= var < self.nvars:
            raise JetError(f"variable index {var} out of range")
        return var

    @property
    def tables(self) -> "_Tables":
        return _tables(self)

    @property
    def size(self) -> int:
        return len(self.tables.indices)

    def contains(self, multi: Sequence[int]) -> bool:
        return tuple(multi) in self.tables.index_of


class _Tables:
    """Index bookkeeping shared by all jets of one spec."""

    def __init__(self, spec: JetSpec):
        k = spec.nvars
        allowed = []
        for idx in itertools.product(*(range(c + 1) for c in spec.caps)):
            if all(sum(idx[i] for i in vars_) <= cap for vars_, cap in spec.blocks):
                allowed.append(idx)
        allowed.sort(key=lambda a: (sum(a), tuple(-x for x in a)))
        self.indices = np.array(allowed, dtype=np.int64).reshape(len(allowed), k)
        self.index_of = {a: i for i, a in enumerate(allowed)}
        n = len(allowed)
        self.max_degree = int(self.indices.sum(axis=1).max()) if n else 0
        self.factorials = np.array(
            [math.prod(math.factorial(x) for x in a) for a in allowed], dtype=float
        )

        # product table: all (i, j) with indices[i] + indices[j] allowed
        radix = [2 * c + 1 for c in spec.caps]
        weights = np.ones(k, dtype=np.int64)
        for t in range(k - 2, -1, -1):
            weights[t] = weights[t + 1] * radix[t + 1]
        dense = np.full(int(np.prod(radix)) if k else 1, -1, dtype=np.int64)
        dense[self.indices @ weights] = np.arange(n)
        sums = self.indices[:, None, :] + self.indices[None, :, :]
        target = dense[sums @ weights]
        I, J = np.nonzero(target >= 0)
        K = target[I, J]
        order = np.argsort(K, kind="stable")
        self.mul_i = I[order].astype(np.int64)
        self.mul_j = J[order].astype(np.int64)
        sortedk = K[order]
        self.mul_starts = np.searchsorted(sortedk, np.arange(n))

        # derivative tables per variable
        self.deriv = []
        for v in range(k):
            src, dst, fac = [], [], []
            for i, a in enumerate(allowed):
                if a[v] >= 1:
                    b = list(a)
                    b[v] -= 1
                    src.append(i)
                    dst.append(self.index_of[tuple(b)])
                    fac.append(a[v])
            self.deriv.append(
                (np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64), np.array(fac, dtype=float))
            )


@functools.lru_cache(maxsize=None)
def _tables(spec: JetSpec) -> _Tables:
    return _Tables(spec)


@functools.lru_cache(maxsize=None)
def _embedding(src: JetSpec, dst: JetSpec) -> tuple[np.ndarray, np.ndarray]:
    pos = []
    for name in src.names:
        pos.append(dst.names.index(name) if name in dst.names else None)
    from_, to = [], []
    for i, a in enumerate(src.tables.indices):
        b = [0] * dst.nvars
        ok = True
        for e, p in zip(a, pos):
            if e == 0:
                continue
            if p is None:
                ok = False
                break
            b[p] = int(e)
        if ok:
            t = dst.tables.index_of.get(tuple(b))
            if t is not None:
                from_.append(i)
                to.append(t)
    return np.array(from_, dtype=np.int64), np.array(to, dtype=np.int64)


def _is_jet(x) -> bool:
    return isinstance(x, Jet)


class Jet:
    """A (possibly array-valued) truncated Taylor expansion."""

    __slots__ = ("spec", "c")
    __array_ufunc__ = None

    def __init__(self, spec: JetSpec, coeffs):
        self.spec = spec
        c = np.asarray(coeffs, dtype=complex)
        if c.shape[-1:] != (spec.size,):
            raise JetError(f"coefficient axis has length {c.shape[-1:]}, expected {spec.size}")
        self.c = c

    # -- construction -------------------------------------------------------
    @classmethod
    def constant(cls, spec: JetSpec, value) -> "Jet":
        value = np.asarray(value, dtype=complex)
        c = np.zeros(value.shape + (spec.size,), dtype=complex)
        c[..., 0] = value
        return cls(spec, c)

    @classmethod
    def zeros(cls, spec: JetSpec, shape=()) -> "Jet":
        return cls(spec, np.zeros(tuple(shape) + (spec.size,), dtype=complex))

    # -- basic accessors ----------------------------------------------------
    @property
    def shape(self) -> tuple[int, ...]:
        return self.c.shape[:-1]

    @property
    def value(self):
        v = self.c[..., 0]
        return v if v.shape else complex(v)

    def __len__(self):
        return self.shape[0]

    def __getitem__(self, item) -> "Jet":
        if not isinstance(item, tuple):
            item = (item,)
        if any(i is Ellipsis for i in item):
            raise JetError("Ellipsis indexing of jets is not supported")
        return Jet(self.spec, self.c[item + (Ellipsis, slice(None))])

    def __iter__(self):
        for i in range(self.shape[0]):
            yield self[i]

    def __repr__(self):
        return f"Jet(shape={self.shape}, value={self.value!r}, vars={self.spec.names})"

    @property
    def T(self) -> "Jet":
        nd = len(self.shape)
        axes = tuple(reversed(range(nd))) + (nd,)
        return Jet(self.spec, np.transpose(self.c, axes))

    def sum(self, axis=0) -> "Jet":
        nd = len(self.shape)
        if axis < 0:
            axis += nd
        return Jet(self.spec, self.c.sum(axis=axis))

    def coefficient(self, multi: Sequence[int]):
        """Taylor coefficient of ``multi`` (zero if beyond the caps)."""
        t = self.spec.tables.index_of.get(tuple(multi))
        if t is None:
            return np.zeros(self.shape, dtype=complex) if self.shape else 0j
        v = self.c[..., t]
        return v if v.shape else complex(v)

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "Jet":
        if _is_jet(other):
            if other.spec != self.spec:
                raise JetError("jets of different specs cannot be combined; embed first")
            return other
        return Jet.constant(self.spec, other)

    def __add__(self, other):
        if _is_jet(other):
            return Jet(self.spec, self.c + self._coerce(other).c)
        other = np.asarray(other, dtype=complex)
        c = np.array(np.broadcast_to(self.c, np.broadcast_shapes(self.c.shape, other.shape + (1,))))
        c[..., 0] += other
        return Jet(self.spec, c)

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.spec, -self.c)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if _is_jet(other):
            other = self._coerce(other)
            t = self.spec.tables
            prod = self.c[..., t.mul_i] * other.c[..., t.mul_j]
            return Jet(self.spec, np.add.reduceat(prod, t.mul_starts, axis=-1))
        other = np.asarray(other, dtype=complex)
        return Jet(self.spec, self.c * other[..., None])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_jet(other):
            return self * reciprocal(other)
        other = np.asarray(other, dtype=complex)
        if np.any(np.abs(other) <= ZERO_THRESHOLD):
            raise JetPoleError(other)
        return Jet(self.spec, self.c / other[..., None])

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)):
            raise JetError("only integer powers of jets are supported")
        if n < 0:
            return reciprocal(self) ** (-n)
        result = Jet.constant(self.spec, np.ones(self.shape, dtype=complex))
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- calculus -----------------------------------------------------------
    def diff(self, var: int | str) -> "Jet":
        """Partial derivative; the top-degree coefficients become zero (unknown)."""
        v = self.spec.var_index(var)
        src, dst, fac = self.spec.tables.deriv[v]
        out = np.zeros_like(self.c)
        out[..., dst] = self.c[..., src] * fac
        return Jet(self.spec, out)

    def partial(self, multi: Sequence[int] | dict):
        """Partial derivative value (Taylor coefficient times multi-index factorial)."""
        return extract_partial(self, multi)

    def embed(self, spec: JetSpec) -> "Jet":
        """Re-express in ``spec`` (variables matched by name, missing ones held constant)."""
        if spec == self.spec:
            return self
        from_, to = _embedding(self.spec, spec)
        out = np.zeros(self.shape + (spec.size,), dtype=complex)
        out[..., to] = self.c[..., from_]
        return Jet(spec, out)

    def nilpotent(self) -> "Jet":
        c = self.c.copy()
        c[..., 0] = 0
        return Jet(self.spec, c)


# -- construction helpers ----------------------------------------------------

def seed_variable(spec: JetSpec, index: int | str, value) -> Jet:
    """Jet of the coordinate function ``index`` expanded at ``value``."""
    v = spec.var_index(index)
    if spec.caps[v] < 1:
        raise JetError(f"variable {spec.names[v]!r} has degree cap 0 and cannot be seeded")
    unit = [0] * spec.nvars
    unit[v] = 1
    c = np.zeros(spec.size, dtype=complex)
    c[0] = value
    t = spec.tables.index_of.get(tuple(unit))
    if t is None:
        raise JetError(f"variable {spec.names[v]!r} is excluded by a block cap")
    c[t] = 1.0
    return Jet(spec, c)


def constant(spec: JetSpec, value) -> Jet:
    return Jet.constant(spec, value)


def stack(items: Sequence, spec: JetSpec | None = None) -> Jet:
    """Stack jets (or constants) along a new leading value axis."""
    if spec is None:
        for it in items:
            if _is_jet(it):
                spec = it.spec
                break
    if spec is None:
        raise JetError("stack needs at least one jet or an explicit spec")
    jets = [it if _is_jet(it) else Jet.constant(spec, it) for it in items]
    shape = np.broadcast_shapes(*(j.shape for j in jets))
    return Jet(spec, np.stack([np.broadcast_to(j.c, shape + (spec.size,)) for j in jets]))


def extract_partial(j: Jet, multi: Sequence[int] | dict):
    if isinstance(multi, dict):
        m = [0] * j.spec.nvars
        for name, order in multi.items():
            m[j.spec.var_index(name)] = order
        multi = m
    multi = tuple(int(x) for x in multi)
    if len(multi) != j.spec.nvars:
        raise JetError("multi-index length does not match the jet spec")
    t = j.spec.tables.index_of.get(multi)
    if t is None:
        raise JetError(f"multi-index {multi} is outside the jet caps")
    v = j.c[..., t] * j.spec.tables.factorials[t]
    return v if v.shape else complex(v)


# -- elementary functions ----------------------------------------------------

def _compose(a: Jet, coeffs: list) -> Jet:
    """Evaluate sum_k coeffs[k] * h**k with h the nilpotent part of ``a`` (Horner)."""
    h = a.nilpotent()
    deg = min(len(coeffs) - 1, a.spec.tables.max_degree)
    r = Jet.constant(a.spec, coeffs[deg])
    for k in range(deg - 1, -1, -1):
        r = r * h + coeffs[k]
    return r


def _degree(a: Jet) -> int:
    return a.spec.tables.max_degree


def reciprocal(a):
    if not _is_jet(a):
        a = np.asarray(a, dtype=complex)
        if np.any(np.abs(a) <= ZERO_THRESHOLD):
            raise JetPoleError(a)
        return 1.0 / a
    a0 = np.asarray(a.c[..., 0])
    if np.any(np.abs(a0) <= ZERO_THRESHOLD):
        raise JetPoleError(a.value)
    coeffs = [1.0 / a0]
    for _ in range(_degree(a)):
        coeffs.append(-coeffs[-1] / a0)
    return _compose(a, coeffs)


def sqrt(a):
    """Principal-branch square root."""
    if not _is_jet(a):
        return np.sqrt(np.asarray(a, dtype=complex))
    a0 = np.asarray(a.c[..., 0])
    if np.any(np.abs(a0) <= ZERO_THRESHOLD):
        raise JetBranchPointError(a.value)
    coeffs = [np.sqrt(a0)]
    for k in range(_degree(a)):
        coeffs.append(coeffs[-1] * (0.5 - k) / ((k + 1) * a0))
    return _compose(a, coeffs)


def exp(a):
    if not _is_jet(a):
        return np.exp(np.asarray(a, dtype=complex))
    e = np.exp(np.asarray(a.c[..., 0]))
    coeffs = [e]
    for k in range(_degree(a)):
        coeffs.append(coeffs[-1] / (k + 1))
    return _compose(a, coeffs)


def log(a):
    if not _is_jet(a):
        return np.log(np.asarray(a, dtype=complex))
    a0 = np.asarray(a.c[..., 0])
    if np.any(np.abs(a0) <= ZERO_THRESHOLD):
        raise JetBranchPointError(a.value)
    coeffs = [np.log(a0)]
    for k in range(1, _degree(a) + 1):
        coeffs.append((-1) ** (k + 1) / (k * a0**k))
    return _compose(a, coeffs)


def _trig_pair(a0, deg, s0, c0, sign):
    # derivatives cycle s, c, sign*s, sign*c ... (sign=-1 for sin/cos, +1 for sinh/cosh)
    ds = [s0, c0]
    for k in range(2, deg + 1):
        ds.append(sign * ds[k - 2])
    return [d / math.factorial(k) for k, d in enumerate(ds[: deg + 1])]


def sin(a):
    if not _is_jet(a):
        return np.sin(np.asarray(a, dtype=complex))
    a0 = np.asarray(a.c[..., 0])
    return _compose(a, _trig_pair(a0, _degree(a), np.sin(a0), np.cos(a0), -1))


def cos(a):
    if not _is_jet(a):
        return np.cos(np.asarray(a, dtype=complex))
    a0 = np.asarray(a.c[..., 0])
    return _compose(a, _trig_pair(a0, _degree(a), np.cos(a0), -np.sin(a0), -1))


def sinh(a):
    if not _is_jet(a):
        return np.sinh(np.asarray(a, dtype=complex))
    a0 = np.asarray(a.c[..., 0])
    return _compose(a, _trig_pair(a0, _degree(a), np.sinh(a0), np.cosh(a0), 1))


def cosh(a):
    if not _is_jet(a):
        return np.cosh(np.asarray(a, dtype=complex))
    a0 = np.asarray(a.c[..., 0])
    return _compose(a, _trig_pair(a0, _degree(a), np.cosh(a0), np.sinh(a0), 1))


def tanh(a):
    return sinh(a) * reciprocal(cosh(a))


def value_of(x):
    """Zero-order value of a jet, or ``x`` itself."""
    return x.value if _is_jet(x) else x


# -- finite-difference oracle -------------------------------------------------

@functools.lru_cache(maxsize=None)
def _central_weights(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Fourth-order accurate central stencil for the ``order``-th derivative."""
    if order == 0:
        return np.array([0]), np.array([1.0])
    half = (order + 1) // 2 + 1
    offsets = np.arange(-half, half + 1)
    A = np.vander(offsets.astype(float), increasing=True).T
    rhs = np.zeros(len(offsets))
    rhs[order] = math.factorial(order)
    w = np.linalg.solve(A, rhs)
    return offsets, w


_DEFAULT_STEPS = {1: 1e-3, 2: 2e-3, 3: 5e-3}


def fd_oracle(
    f: Callable[[Sequence[float]], complex],
    point: Sequence[float],
    multi: Sequence[int],
    step: float | None = None,
) -> complex:
    """Central finite-difference estimate of a partial derivative of total order <= 3.

    ``f`` maps a real point to a complex scalar.  The stencil is the tensor
    product of fourth-order accurate one-dimensional central stencils.
    """
    multi = tuple(int(m) for m in multi)
    total = sum(multi)
    if total > 3:
        raise JetError("fd_oracle supports total order <= 3")
    point = np.asarray(point, dtype=float)
    if total == 0:
        return complex(f(point))
    h = step if step is not None else _DEFAULT_STEPS[total]
    stencils = [_central_weights(m) for m in multi]
    acc = 0j
    for combo in itertools.product(*(range(len(s[0])) for s in stencils)):
        w = 1.0
        x = point.copy()
        for d, (offsets, weights) in enumerate(stencils):
            w *= weights[combo[d]]
            x[d] += offsets[combo[d]] * h
        if w != 0.0:
            acc += w * complex(f(x))
    return acc / h**total
