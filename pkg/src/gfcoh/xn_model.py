"""Finite commutative dg-algebra model with cohomology equal to that of vect(n).

Generators ``xi_i`` (odd, degree 2i-1) and ``c_i`` (even, degree 2i),
differential ``d xi_i = c_i``, and every monomial ``c^l`` with
``l_1 + 2 l_2 + ... + n l_n > n`` set to zero.  Monomials are keys
``(S, l)`` with S a sorted tuple of xi indices (1-based).
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Mapping

from .ce_engine import BettiTable
from .exact_linalg import SparseMatrix, rank

__all__ = ["CdgaElement", "model_basis", "model_differential", "model_betti", "monomial_degree"]


def _chern(l) -> int:
    return sum((i + 1) * e for i, e in enumerate(l))


def monomial_degree(key) -> int:
    S, l = key
    return sum(2 * i - 1 for i in S) + sum(2 * (i + 1) * e for i, e in enumerate(l))


class CdgaElement:
    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping | None = None):
        self.n = n
        clean = {}
        for (S, l), c in (terms or {}).items():
            S, l = tuple(S), tuple(l)
            if len(l) != n or _chern(l) > n or not c:
                continue
            if len(set(S)) != len(S) or any(not 1 <= i <= n for i in S):
                if len(set(S)) != len(S):
                    continue
                raise ValueError(f"xi index out of range in {S}")
            sign = _sort_parity(S)
            key = (tuple(sorted(S)), l)
            v = clean.get(key, 0) + sign * Fraction(c)
            if v:
                clean[key] = v
            else:
                clean.pop(key, None)
        self.terms = clean

    @classmethod
    def xi(cls, n: int, i: int) -> "CdgaElement":
        return cls(n, {((i,), (0,) * n): 1})

    @classmethod
    def c(cls, n: int, i: int) -> "CdgaElement":
        l = [0] * n
        l[i - 1] = 1
        return cls(n, {((), tuple(l)): 1})

    def __mul__(self, other) -> "CdgaElement":
        if not isinstance(other, CdgaElement):
            return CdgaElement(self.n, {k: v * Fraction(other) for k, v in self.terms.items()})
        acc: dict = {}
        for (S1, l1), a in self.terms.items():
            for (S2, l2), b in other.terms.items():
                if set(S1) & set(S2):
                    continue
                l = tuple(x + y for x, y in zip(l1, l2))
                key = (S1 + S2, l)
                # CdgaElement normalises the xi order with its sign
                acc[key] = acc.get(key, 0) + a * b
        return CdgaElement(self.n, acc)

    def __rmul__(self, c):
        return self * c

    def __add__(self, other):
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, 0) + v
        return CdgaElement(self.n, acc)

    def __neg__(self):
        return CdgaElement(self.n, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if isinstance(other, CdgaElement):
            return self.terms == other.terms
        return NotImplemented

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        out = []
        for (S, l), c in sorted(self.terms.items()):
            f = [f"xi{i}" for i in S] + [f"c{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(l) if e]
            out.append(f"{c}*" + ("*".join(f) or "1"))
        return " + ".join(out)


def _sort_parity(S) -> int:
    inv = sum(1 for a, b in combinations(range(len(S)), 2) if S[a] > S[b])
    return -1 if inv & 1 else 1


def model_differential(e: CdgaElement) -> CdgaElement:
    """Derivation with ``d xi_k = c_k``: sign ``(-1)^(number of xi before k)``."""
    acc: dict = {}
    for (S, l), c in e.terms.items():
        for pos, k in enumerate(S):
            ll = list(l)
            ll[k - 1] += 1
            key = (S[:pos] + S[pos + 1:], tuple(ll))
            acc[key] = acc.get(key, 0) + (-c if pos & 1 else c)
    return CdgaElement(e.n, acc)


def _chern_vectors(n: int):
    out = []

    def rec(i, acc, w):
        if i > n:
            out.append(tuple(acc))
            return
        e = 0
        while w + i * e <= n:
            rec(i + 1, acc + [e], w + i * e)
            e += 1

    rec(1, [], 0)
    return out


def model_basis(n: int) -> list:
    """All nonzero monomials, ordered by degree then (S, l)."""
    keys = [(S, l) for r in range(n + 1) for S in combinations(range(1, n + 1), r) for l in _chern_vectors(n)]
    return sorted(keys, key=lambda k: (monomial_degree(k), k))


def model_betti(n: int, q_max: int | None = None) -> BettiTable:
    basis = model_basis(n)
    top = max(monomial_degree(k) for k in basis)
    if q_max is None:
        q_max = top
    by_deg: dict = {}
    for k in basis:
        by_deg.setdefault(monomial_degree(k), []).append(k)
    ranks = {}
    for q in range(-1, q_max + 1):
        src = by_deg.get(q, [])
        tgt = by_deg.get(q + 1, [])
        idx = {k: i for i, k in enumerate(tgt)}
        entries = {}
        for cidx, k in enumerate(src):
            for key, v in model_differential(CdgaElement(n, {k: 1})).terms.items():
                entries[(idx[key], cidx)] = v
        ranks[q] = rank(SparseMatrix(len(tgt), len(src), entries))
    table = {q: len(by_deg.get(q, [])) - ranks[q] - ranks[q - 1] for q in range(0, q_max + 1)}
    return BettiTable(n, table, False, "minimal model", {"basis_size": len(basis), "top_degree": top})
