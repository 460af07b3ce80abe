"""Cartan calculus on the formal n-disk.

Vector fields are finite sums of monomial fields ``x^a d_i``; forms are
finite sums of ``x^b dx_I`` with ``I`` strictly increasing.  Coefficients
are exact rationals by default but any ring-like object that supports
``+`` and scaling by rationals works (the cohomology engine pushes
symbolic linear combinations through the same code).

Conventions, fixed once:

* ``d`` inserts ``dx_i`` at the front and reorders with the Koszul sign.
* ``iota_X`` contracts against the leftmost slot:
  ``iota_{d_j}(dx_{i1} ^ ... ^ dx_{ip}) = (-1)^r dx_I\\{i_r}`` when ``j = i_r``
  (``r`` counted from zero).
* The bracket is the vector-field commutator, ``[X, Y] = X(Y) - Y(X)``.
  With it ``A -> sum_ij A_ij x_i d_j`` is a Lie algebra homomorphism
  ``gl(n) -> vect(n)_0``.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Mapping, NamedTuple, Sequence

__all__ = [
    "MonomialField",
    "FormalVectorField",
    "FormalForm",
    "JacobianSeries",
    "bracket",
    "bracket_monomials",
    "de_rham",
    "contract",
    "lie_derivative",
    "jacobian",
    "gl_embedding",
    "euler_field",
    "radial_homotopy",
    "field_basis",
    "monomials_of_degree",
    "wedge_sign",
]


class MonomialField(NamedTuple):
    """The field ``x^exponent d_direction``.

    ``order`` duplicates ``sum(exponent)`` so that plain tuple comparison
    realises the canonical order ``(|a|, a, i)``.
    """

    order: int
    exponent: tuple
    direction: int

    @classmethod
    def of(cls, exponent: Sequence[int], direction: int) -> "MonomialField":
        exponent = tuple(exponent)
        if any(e < 0 for e in exponent) or not 0 <= direction < len(exponent):
            raise ValueError(f"bad monomial field {exponent}, {direction}")
        return cls(sum(exponent), exponent, direction)

    @property
    def weight(self) -> int:
        return self.order - 1

    @property
    def n(self) -> int:
        return len(self.exponent)

    def multi_weight(self) -> tuple:
        """Weight under the diagonal torus ``x_j d_j``."""
        w = list(self.exponent)
        w[self.direction] -= 1
        return tuple(w)

    def __str__(self):
        return _monomial_str(self.exponent) + f"d{self.direction + 1}"


def _monomial_str(beta) -> str:
    parts = []
    for i, e in enumerate(beta):
        if e == 1:
            parts.append(f"x{i + 1}")
        elif e > 1:
            parts.append(f"x{i + 1}^{e}")
    return "*".join(parts) + ("*" if parts else "")


def monomials_of_degree(n: int, d: int) -> list[tuple]:
    """Exponent vectors of total degree ``d`` in lexicographic order."""
    if n == 1:
        return [(d,)]
    out = []
    for first in range(d + 1):
        for rest in monomials_of_degree(n - 1, d - first):
            out.append((first,) + rest)
    return out


@lru_cache(maxsize=None)
def field_basis(n: int, max_order: int) -> tuple:
    """All monomial fields with ``|a| <= max_order`` in canonical order."""
    out = []
    for d in range(max_order + 1):
        for a in monomials_of_degree(n, d):
            for i in range(n):
                out.append(MonomialField(d, a, i))
    out.sort()
    return tuple(out)


def _add_into(acc: dict, key, value):
    v = acc.get(key)
    v = value if v is None else v + value
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


def _clean(terms: Mapping) -> dict:
    return {k: v for k, v in terms.items() if v}


class FormalVectorField:
    """Finite linear combination of monomial fields on the formal n-disk."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[MonomialField, object] | None = None):
        self.n = n
        self.terms = _clean(terms or {})
        for m in self.terms:
            if m.n != n:
                raise ValueError(f"monomial field {m} does not live in dimension {n}")

    @classmethod
    def monomial(cls, exponent: Sequence[int], direction: int, coeff=1) -> "FormalVectorField":
        m = MonomialField.of(exponent, direction)
        return cls(m.n, {m: Fraction(coeff)})

    @classmethod
    def from_components(cls, n: int, components: Sequence[Mapping[tuple, object]]) -> "FormalVectorField":
        """``components[j]`` maps exponent vectors to the coefficient of ``d_j``."""
        terms = {}
        for j, comp in enumerate(components):
            for a, c in comp.items():
                _add_into(terms, MonomialField.of(a, j), c)
        return cls(n, terms)

    def component(self, j: int) -> dict:
        return {m.exponent: c for m, c in self.terms.items() if m.direction == j}

    def _check(self, other: "FormalVectorField"):
        if self.n != other.n:
            raise ValueError(f"dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        self._check(other)
        acc = dict(self.terms)
        for k, v in other.terms.items():
            _add_into(acc, k, v)
        return FormalVectorField(self.n, acc)

    def __neg__(self):
        return FormalVectorField(self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        return FormalVectorField(self.n, {k: c * v for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, FormalVectorField):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def weights(self) -> set:
        return {m.weight for m in self.terms}

    def vanishing_order(self) -> int | None:
        """Largest k with the field in vect(n)_k (None for the zero field)."""
        if not self.terms:
            return None
        return min(m.order for m in self.terms) - 1

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*{m}" for m, c in sorted(self.terms.items()))


@lru_cache(maxsize=None)
def bracket_monomials(a: MonomialField, b: MonomialField) -> tuple:
    """``[x^a d_i, x^b d_j] = b_i x^(a+b-e_i) d_j - a_j x^(a+b-e_j) d_i``."""
    out = {}
    i, j = a.direction, b.direction
    s = tuple(p + q for p, q in zip(a.exponent, b.exponent))
    if b.exponent[i]:
        e = list(s)
        e[i] -= 1
        _add_into(out, MonomialField(a.order + b.order - 1, tuple(e), j), b.exponent[i])
    if a.exponent[j]:
        e = list(s)
        e[j] -= 1
        _add_into(out, MonomialField(a.order + b.order - 1, tuple(e), i), -a.exponent[j])
    return tuple(sorted(out.items()))


def bracket(X: FormalVectorField, Y: FormalVectorField) -> FormalVectorField:
    X._check(Y)
    acc = {}
    for a, ca in X.terms.items():
        for b, cb in Y.terms.items():
            for m, c in bracket_monomials(a, b):
                _add_into(acc, m, ca * cb * c)
    return FormalVectorField(X.n, acc)


def euler_field(n: int) -> FormalVectorField:
    terms = {}
    for i in range(n):
        e = [0] * n
        e[i] = 1
        terms[MonomialField(1, tuple(e), i)] = Fraction(1)
    return FormalVectorField(n, terms)


def gl_embedding(A: Sequence[Sequence[object]]) -> FormalVectorField:
    """``A -> sum_ij A_ij x_i d_j``."""
    n = len(A)
    terms = {}
    for i in range(n):
        for j in range(n):
            if A[i][j]:
                e = [0] * n
                e[i] = 1
                terms[MonomialField(1, tuple(e), j)] = Fraction(A[i][j])
    return FormalVectorField(n, terms)


# -- forms -------------------------------------------------------------------

def wedge_sign(I: tuple, J: tuple) -> tuple[int, tuple] | None:
    """Sign and sorted index set of ``dx_I ^ dx_J``; None when they overlap."""
    if not I:
        return 1, J
    if not J:
        return 1, I
    inv = 0
    merged = []
    i = j = 0
    while i < len(I) and j < len(J):
        if I[i] < J[j]:
            merged.append(I[i])
            i += 1
        elif I[i] > J[j]:
            merged.append(J[j])
            inv += len(I) - i
            j += 1
        else:
            return None
    merged.extend(I[i:])
    merged.extend(J[j:])
    return (-1 if inv & 1 else 1), tuple(merged)


def _mono_mul(a: tuple, b: tuple) -> tuple:
    return tuple(p + q for p, q in zip(a, b))


class FormalForm:
    """Finite sum of ``c * x^beta dx_I``; need not be homogeneous in degree."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[tuple, object] | None = None):
        self.n = n
        self.terms = _clean(terms or {})

    @classmethod
    def zero(cls, n: int) -> "FormalForm":
        return cls(n, {})

    @classmethod
    def constant(cls, n: int, c) -> "FormalForm":
        return cls(n, {((0,) * n, ()): c})

    @classmethod
    def polynomial(cls, n: int, poly: Mapping[tuple, object]) -> "FormalForm":
        return cls(n, {(tuple(b), ()): c for b, c in poly.items()})

    @classmethod
    def monomial(cls, beta: Sequence[int], I: Sequence[int] = (), coeff=1) -> "FormalForm":
        I = tuple(I)
        if list(I) != sorted(set(I)):
            raise ValueError("form index set must be strictly increasing")
        return cls(len(beta), {(tuple(beta), I): Fraction(coeff)})

    @classmethod
    def dx(cls, n: int, i: int) -> "FormalForm":
        return cls(n, {((0,) * n, (i,)): Fraction(1)})

    def degrees(self) -> set:
        return {len(I) for _, I in self.terms}

    @property
    def degree(self) -> int:
        ds = self.degrees()
        if len(ds) > 1:
            raise ValueError("inhomogeneous form")
        return ds.pop() if ds else 0

    def weights(self) -> set:
        return {sum(b) + len(I) for b, I in self.terms}

    def component(self, p: int) -> "FormalForm":
        return FormalForm(self.n, {k: v for k, v in self.terms.items() if len(k[1]) == p})

    def at_zero(self):
        """Constant coefficient of the function part (zero for p > 0)."""
        return self.terms.get(((0,) * self.n, ()), 0)

    def truncate(self, order: int) -> "FormalForm":
        return FormalForm(self.n, {k: v for k, v in self.terms.items() if sum(k[0]) <= order})

    def __add__(self, other):
        if other == 0:
            return self
        acc = dict(self.terms)
        for k, v in other.terms.items():
            _add_into(acc, k, v)
        return FormalForm(self.n, acc)

    __radd__ = __add__

    def __neg__(self):
        return FormalForm(self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "FormalForm":
        if not c:
            return FormalForm(self.n, {})
        return FormalForm(self.n, {k: c * v for k, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def wedge(self, other: "FormalForm") -> "FormalForm":
        acc = {}
        for (b1, I1), c1 in self.terms.items():
            for (b2, I2), c2 in other.terms.items():
                ws = wedge_sign(I1, I2)
                if ws is None:
                    continue
                s, I = ws
                _add_into(acc, (_mono_mul(b1, b2), I), c1 * c2 if s > 0 else -(c1 * c2))
        return FormalForm(self.n, acc)

    __xor__ = wedge

    def __mul__(self, other):
        if isinstance(other, FormalForm):
            return self.wedge(other)
        return self.scale(other)

    def partial(self, i: int) -> "FormalForm":
        """Coefficientwise derivative d/dx_i."""
        acc = {}
        for (b, I), c in self.terms.items():
            if b[i]:
                e = list(b)
                e[i] -= 1
                _add_into(acc, (tuple(e), I), b[i] * c)
        return FormalForm(self.n, acc)

    def __eq__(self, other):
        if isinstance(other, FormalForm):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __bool__(self):
        return bool(self.terms)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        if not self.terms:
            return "0"
        out = []
        for (b, I), c in sorted(self.terms.items(), key=lambda t: (len(t[0][1]), t[0])):
            dx = "^".join(f"dx{i + 1}" for i in I)
            mono = _monomial_str(b).rstrip("*")
            body = "*".join(p for p in (mono, dx) if p) or "1"
            out.append(f"{c}*{body}")
        return " + ".join(out)


def de_rham(w: FormalForm) -> FormalForm:
    acc = {}
    for (b, I), c in w.terms.items():
        for i, e in enumerate(b):
            if not e:
                continue
            ws = wedge_sign((i,), I)
            if ws is None:
                continue
            s, J = ws
            bb = list(b)
            bb[i] -= 1
            _add_into(acc, (tuple(bb), J), e * c if s > 0 else -(e * c))
    return FormalForm(w.n, acc)


def _contract_monomial(m: MonomialField, I: tuple):
    j = m.direction
    for r, i in enumerate(I):
        if i == j:
            return (-1 if r & 1 else 1), I[:r] + I[r + 1:]
    return None


def contract(X: FormalVectorField, w: FormalForm) -> FormalForm:
    """Interior product; zero on functions."""
    if X.n != w.n:
        raise ValueError("dimension mismatch")
    acc = {}
    for (b, I), c in w.terms.items():
        if not I:
            continue
        for m, cx in X.terms.items():
            r = _contract_monomial(m, I)
            if r is None:
                continue
            s, J = r
            v = cx * c
            _add_into(acc, (_mono_mul(b, m.exponent), J), v if s > 0 else -v)
    return FormalForm(w.n, acc)


def lie_derivative(X: FormalVectorField, w: FormalForm) -> FormalForm:
    """``L_X`` computed directly: derivation on coefficients, ``L_X dx_k = d f_k``.

    Cartan's formula is checked against this in the tests rather than
    used to define it.
    """
    if X.n != w.n:
        raise ValueError("dimension mismatch")
    n = w.n
    acc = {}
    for (b, I), c in w.terms.items():
        for m, cx in X.terms.items():
            i = m.direction
            a = m.exponent
            # X(x^b) dx_I
            if b[i]:
                e = list(_mono_mul(a, b))
                e[i] -= 1
                _add_into(acc, (tuple(e), I), b[i] * cx * c)
            # x^b dx_{i1} .. d(f_k) .. dx_{ip} where f_k = cx * x^a when k = i
            for r, k in enumerate(I):
                if k != i:
                    continue
                for l in range(n):
                    if not a[l]:
                        continue
                    rest = I[:r] + I[r + 1:]
                    if l in rest:
                        continue
                    # place dx_l at slot r, then sort
                    J = I[:r] + (l,) + I[r + 1:]
                    order = sorted(range(len(J)), key=lambda t: J[t])
                    s = _perm_sign(order)
                    e = list(_mono_mul(a, b))
                    e[l] -= 1
                    v = a[l] * cx * c
                    _add_into(acc, (tuple(e), tuple(sorted(J))), v if s > 0 else -v)
    return FormalForm(n, acc)


def _perm_sign(p: Sequence[int]) -> int:
    p = list(p)
    s = 1
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s


def radial_homotopy(w: FormalForm) -> FormalForm:
    """Pull back along ``x -> t x`` and integrate the ``dt`` part over [0, 1].

    On ``x^b dx_I`` with ``p = |I| >= 1`` this is ``iota_E(x^b dx_I) / (|b| + p)``;
    functions are sent to zero.
    """
    acc = {}
    for (b, I), c in w.terms.items():
        if not I:
            continue
        wt = sum(b) + len(I)
        for r, i in enumerate(I):
            e = list(b)
            e[i] += 1
            v = Fraction(1, wt) * c
            _add_into(acc, (tuple(e), I[:r] + I[r + 1:]), -v if r & 1 else v)
    return FormalForm(w.n, acc)


class JacobianSeries:
    """Matrix of polynomials ``J[i][j] = d_i f_j`` truncated at ``order``."""

    __slots__ = ("n", "entries", "order")

    def __init__(self, n: int, entries, order: int | None):
        self.n = n
        self.entries = entries
        self.order = order

    def at_zero(self) -> list[list[Fraction]]:
        return [[Fraction(self.entries[i][j].at_zero()) for j in range(self.n)] for i in range(self.n)]

    def differential(self) -> list[list[FormalForm]]:
        """Entrywise de Rham differential: the matrix of one-forms ``dJ``."""
        return [[de_rham(e) for e in row] for row in self.entries]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]


def jacobian(X: FormalVectorField, truncation_order: int | None = None) -> JacobianSeries:
    n = X.n
    entries = []
    for i in range(n):
        row = []
        for j in range(n):
            f = FormalForm.polynomial(n, X.component(j))
            e = f.partial(i)
            if truncation_order is not None:
                e = e.truncate(truncation_order)
            row.append(e)
        entries.append(row)
    return JacobianSeries(n, entries, truncation_order)


def matrix_product(A, B):
    """Product of square matrices whose entries are forms."""
    n = len(A)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc = FormalForm.zero(A[0][0].n)
            for k in range(n):
                if A[i][k] and B[k][j]:
                    acc = acc + A[i][k].wedge(B[k][j])
            row.append(acc)
        out.append(row)
    return out


def trace(A) -> FormalForm:
    acc = FormalForm.zero(A[0][0].n)
    for i in range(len(A)):
        acc = acc + A[i][i]
    return acc
