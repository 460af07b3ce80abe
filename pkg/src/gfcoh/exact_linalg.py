"""Exact sparse linear algebra over the rationals.

Matrices are stored as a dictionary of nonzero entries.  Elimination is
fraction-free: rows are scaled to primitive integer vectors and combined
with integer multipliers, dividing out the row content after every step so
intermediate coefficients stay small.  Fractions only appear during the
final back-substitution of kernel and preimage computations.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

__all__ = [
    "SparseMatrix",
    "rank",
    "kernel_basis",
    "solve_preimage",
    "DimensionError",
    "Lin",
]


class DimensionError(ValueError):
    pass


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class SparseMatrix:
    """Immutable sparse matrix with exact rational entries."""

    __slots__ = ("rows", "cols", "_entries", "_hash")

    def __init__(self, rows: int, cols: int, entries: Mapping[tuple[int, int], object] | None = None):
        if rows < 0 or cols < 0:
            raise DimensionError("negative matrix shape")
        clean = {}
        for (r, c), v in (entries or {}).items():
            if not (0 <= r < rows and 0 <= c < cols):
                raise DimensionError(f"entry ({r}, {c}) outside {rows}x{cols}")
            v = _frac(v)
            if v:
                clean[(r, c)] = v
        self.rows = rows
        self.cols = cols
        self._entries = MappingProxyType(clean)
        self._hash = None

    @classmethod
    def from_dense(cls, data: Sequence[Sequence[object]], cols: int | None = None) -> "SparseMatrix":
        rows = len(data)
        if cols is None:
            cols = len(data[0]) if rows else 0
        entries = {}
        for r, row in enumerate(data):
            if len(row) != cols:
                raise DimensionError("ragged dense matrix")
            for c, v in enumerate(row):
                if v:
                    entries[(r, c)] = v
        return cls(rows, cols, entries)

    @classmethod
    def from_row_dicts(cls, row_dicts: Sequence[Mapping[int, object]], cols: int) -> "SparseMatrix":
        entries = {}
        for r, row in enumerate(row_dicts):
            for c, v in row.items():
                entries[(r, c)] = v
        return cls(len(row_dicts), cols, entries)

    @classmethod
    def identity(cls, n: int) -> "SparseMatrix":
        return cls(n, n, {(i, i): 1 for i in range(n)})

    @classmethod
    def zero(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols)

    @property
    def entries(self) -> Mapping[tuple[int, int], Fraction]:
        return self._entries

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __len__(self):
        return len(self._entries)

    def row_dicts(self) -> list[dict[int, Fraction]]:
        out: list[dict[int, Fraction]] = [{} for _ in range(self.rows)]
        for (r, c), v in self._entries.items():
            out[r][c] = v
        return out

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self._entries.items():
            out[r][c] = v
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.cols, self.rows, {(c, r): v for (r, c), v in self._entries.items()})

    def permuted(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "SparseMatrix":
        """Entry (r, c) moves to (row_perm[r], col_perm[c])."""
        return SparseMatrix(
            self.rows, self.cols,
            {(row_perm[r], col_perm[c]): v for (r, c), v in self._entries.items()},
        )

    def with_column(self, b: Sequence[object]) -> "SparseMatrix":
        if len(b) != self.rows:
            raise DimensionError("column length does not match row count")
        entries = dict(self._entries)
        for r, v in enumerate(b):
            if v:
                entries[(r, self.cols)] = v
        return SparseMatrix(self.rows, self.cols + 1, entries)

    def matvec(self, v: Sequence[object]) -> list[Fraction]:
        if len(v) != self.cols:
            raise DimensionError(f"vector of length {len(v)} for {self.cols} columns")
        out = [Fraction(0)] * self.rows
        for (r, c), a in self._entries.items():
            x = v[c]
            if x:
                out[r] += a * x
        return out

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise DimensionError("inner dimensions differ")
        right = other.row_dicts()
        acc: dict[tuple[int, int], Fraction] = {}
        for (r, k), a in self._entries.items():
            for c, b in right[k].items():
                key = (r, c)
                acc[key] = acc.get(key, 0) + a * b
        return SparseMatrix(self.rows, other.cols, acc)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape != other.shape:
            raise DimensionError("shape mismatch")
        acc = dict(self._entries)
        for k, v in other._entries.items():
            acc[k] = acc.get(k, 0) + v
        return SparseMatrix(self.rows, self.cols, acc)

    def __neg__(self) -> "SparseMatrix":
        return SparseMatrix(self.rows, self.cols, {k: -v for k, v in self._entries.items()})

    def __sub__(self, other: "SparseMatrix") -> "SparseMatrix":
        return self + (-other)

    def is_zero(self) -> bool:
        return not self._entries

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and dict(self._entries) == dict(other._entries)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, frozenset(self._entries.items())))
        return self._hash

    def max_bits(self) -> int:
        """Largest numerator/denominator bit length among the entries."""
        best = 0
        for v in self._entries.values():
            best = max(best, abs(v.numerator).bit_length(), v.denominator.bit_length())
        return best

    def __repr__(self):
        return f"SparseMatrix({self.rows}x{self.cols}, nnz={len(self._entries)})"


# -- fraction-free elimination ------------------------------------------------

def _primitive(row: dict[int, int]) -> dict[int, int]:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    # leading entry positive keeps the echelon canonical
    lead = row[min(row)]
    if lead < 0:
        g = -g
    if g != 1:
        row = {c: v // g for c, v in row.items()}
    return row


def _integer_rows(m: SparseMatrix) -> list[dict[int, int]]:
    rows = []
    for r in m.row_dicts():
        if not r:
            continue
        den = 1
        for v in r.values():
            den = lcm(den, v.denominator)
        rows.append(_primitive({c: int(v * den) for c, v in r.items()}))
    return rows


def _echelon(rows: Iterable[dict[int, int]]) -> dict[int, dict[int, int]]:
    """Row echelon form keyed by pivot column.

    Rows are fed sparsest first (a cheap Markowitz-style heuristic) and
    reduced against existing pivots with integer cross-multiplication.
    """
    pivots: dict[int, dict[int, int]] = {}
    for row in sorted(rows, key=len):
        row = dict(row)
        while row:
            c = min(row)
            prow = pivots.get(c)
            if prow is None:
                pivots[c] = _primitive(row)
                break
            a, b = prow[c], row[c]
            g = gcd(a, b)
            ma, mb = a // g, b // g
            new = {}
            for k, v in row.items():
                new[k] = v * ma
            for k, v in prow.items():
                x = new.get(k, 0) - v * mb
                if x:
                    new[k] = x
                else:
                    new.pop(k, None)
            row = _primitive(new) if new else new
    return pivots


def rank(m: SparseMatrix) -> int:
    """Exact rank over the rationals."""
    return len(_echelon(_integer_rows(m)))


def _back_substitute(pivots: dict[int, dict[int, int]], x: list[Fraction], ncols: int) -> list[Fraction]:
    """Solve for pivot variables in place.

    Each pivot row reads ``sum_k row[k] x_k = row[ncols]`` where column
    ``ncols`` (if present) holds an augmented right-hand side.
    """
    for c in sorted(pivots, reverse=True):
        row = pivots[c]
        s = Fraction(row.get(ncols, 0))
        for k, v in row.items():
            if k != c and k < ncols:
                s -= v * x[k]
        x[c] = s / row[c]
    return x


def kernel_basis(m: SparseMatrix) -> list[list[Fraction]]:
    """A basis of the right kernel; one vector per non-pivot column."""
    pivots = _echelon(_integer_rows(m))
    basis = []
    for f in range(m.cols):
        if f in pivots:
            continue
        x = [Fraction(0)] * m.cols
        x[f] = Fraction(1)
        basis.append(_back_substitute(pivots, x, m.cols))
    return basis


def solve_preimage(m: SparseMatrix, b: Sequence[object]) -> list[Fraction] | None:
    """Some x with m x = b, or None when b is not in the column space."""
    if len(b) != m.rows:
        raise DimensionError(f"right-hand side has length {len(b)}, expected {m.rows}")
    aug = m.with_column(b)
    pivots = _echelon(_integer_rows(aug))
    if m.cols in pivots:
        return None
    x = _back_substitute(pivots, [Fraction(0)] * m.cols, m.cols)
    if m.matvec(x) != [_frac(v) for v in b]:
        raise ArithmeticError("preimage check failed")  # pragma: no cover
    return x


class Lin:
    """Formal rational linear combination of hashable symbols.

    Used as a coefficient ring stand-in: a cochain whose coefficients are
    independent symbols lets a linear identity be checked on every basis
    vector at once.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[object, object] | None = None):
        self.terms = {k: _frac(v) for k, v in (terms or {}).items() if v}

    @classmethod
    def symbol(cls, key) -> "Lin":
        return cls({key: 1})

    def __add__(self, other):
        if isinstance(other, Lin):
            acc = dict(self.terms)
            for k, v in other.terms.items():
                x = acc.get(k, 0) + v
                if x:
                    acc[k] = x
                else:
                    acc.pop(k, None)
            out = Lin()
            out.terms = acc
            return out
        if other == 0:
            return self
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        out = Lin()
        out.terms = {k: -v for k, v in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c):
        if isinstance(c, Lin):
            raise TypeError("product of two symbolic combinations is not linear")
        c = _frac(c)
        if not c:
            return Lin()
        out = Lin()
        out.terms = {k: v * c for k, v in self.terms.items()}
        return out

    __rmul__ = __mul__

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, Lin):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return "Lin(" + ", ".join(f"{v}*{k!r}" for k, v in self.terms.items()) + ")"
