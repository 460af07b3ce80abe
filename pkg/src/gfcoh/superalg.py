"""Sparse super-commutative polynomials over the rationals.

A generator is any hashable, totally ordered key together with a parity
supplied by a parity function.  Monomials are tuples of ``(generator,
exponent)`` sorted by generator; odd generators have exponent 1.  The sign
of a product is the sign of the shuffle that sorts the odd generators.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping

__all__ = ["SuperAlgebra", "Poly"]


class SuperAlgebra:
    """Holds the parity rule; polynomials carry a reference to it."""

    def __init__(self, parity: Callable[[object], int]):
        self._parity = parity
        self._cache: dict = {}

    def parity(self, g) -> int:
        p = self._cache.get(g)
        if p is None:
            p = self._parity(g) & 1
            self._cache[g] = p
        return p

    def mono_parity(self, mono: tuple) -> int:
        return sum(self.parity(g) for g, _ in mono) & 1

    def gen(self, g, coeff=1) -> "Poly":
        return Poly(self, {((g, 1),): Fraction(coeff)})

    def const(self, c) -> "Poly":
        return Poly(self, {(): Fraction(c)} if c else {})

    def zero(self) -> "Poly":
        return Poly(self, {})

    def mono_mul(self, a: tuple, b: tuple) -> tuple[int, tuple]:
        """Sign and product of two monomials; sign 0 if an odd generator repeats."""
        if not a:
            return 1, b
        if not b:
            return 1, a
        out = []
        sign = 1
        i = j = 0
        # number of odd generators of a not yet emitted
        odd_left = sum(1 for g, _ in a if self.parity(g))
        while i < len(a) and j < len(b):
            ga, ea = a[i]
            gb, eb = b[j]
            if ga < gb:
                out.append(a[i])
                if self.parity(ga):
                    odd_left -= 1
                i += 1
            elif gb < ga:
                if self.parity(gb) and odd_left & 1:
                    sign = -sign
                out.append(b[j])
                j += 1
            else:
                if self.parity(ga):
                    return 0, ()
                out.append((ga, ea + eb))
                i += 1
                j += 1
        out.extend(a[i:])
        out.extend(b[j:])
        return sign, tuple(out)


class Poly:
    __slots__ = ("alg", "terms")

    def __init__(self, alg: SuperAlgebra, terms: Mapping[tuple, object] | None = None):
        self.alg = alg
        self.terms = {k: v for k, v in (terms or {}).items() if v}

    # arithmetic ---------------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Poly):
            if other == 0:
                return self
            other = self.alg.const(other)
        acc = dict(self.terms)
        for k, v in other.terms.items():
            x = acc.get(k, 0) + v
            if x:
                acc[k] = x
            else:
                acc.pop(k, None)
        out = Poly(self.alg)
        out.terms = acc
        return out

    __radd__ = __add__

    def __neg__(self):
        out = Poly(self.alg)
        out.terms = {k: -v for k, v in self.terms.items()}
        return out

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            c = Fraction(other)
            if not c:
                return Poly(self.alg)
            out = Poly(self.alg)
            out.terms = {k: v * c for k, v in self.terms.items()}
            return out
        acc: dict = {}
        mm = self.alg.mono_mul
        for ka, va in self.terms.items():
            for kb, vb in other.terms.items():
                s, k = mm(ka, kb)
                if not s:
                    continue
                x = acc.get(k, 0) + (va * vb if s > 0 else -(va * vb))
                if x:
                    acc[k] = x
                else:
                    acc.pop(k, None)
        out = Poly(self.alg)
        out.terms = acc
        return out

    def __rmul__(self, c):
        return self * c

    def __pow__(self, e: int):
        out = self.alg.const(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __bool__(self):
        return bool(self.terms)

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __len__(self):
        return len(self.terms)

    # structure ----------------------------------------------------------------
    def generators(self) -> set:
        return {g for k in self.terms for g, _ in k}

    def filter(self, pred: Callable[[tuple], bool]) -> "Poly":
        return Poly(self.alg, {k: v for k, v in self.terms.items() if pred(k)})

    def parity_homogeneous(self) -> int | None:
        ps = {self.alg.mono_parity(k) for k in self.terms}
        return ps.pop() if len(ps) == 1 else (0 if not ps else None)

    def derive(self, images: Callable[[object], "Poly | None"], parity: int) -> "Poly":
        """Apply the derivation of the given parity fixed by its values on generators.

        ``images(g)`` returns the image of generator g or None for zero.
        """
        alg = self.alg
        acc = Poly(alg)
        for mono, c in self.terms.items():
            prefix_par = 0
            for pos, (g, e) in enumerate(mono):
                img = images(g)
                if img is not None and img:
                    prefix = Poly(alg, {mono[:pos]: 1})
                    rest_mono = mono[pos + 1:]
                    if e > 1:
                        rest_mono = ((g, e - 1),) + rest_mono
                    rest = Poly(alg, {rest_mono: 1})
                    sgn = -1 if (parity and prefix_par) else 1
                    term = prefix * img * rest
                    acc = acc + term * (c * e * sgn)
                if alg.parity(g):
                    prefix_par ^= 1
        return acc

    def left_derivative(self, g) -> "Poly":
        par = self.alg.parity(g)
        one = self.alg.const(1)
        return self.derive(lambda h: one if h == g else None, par)

    def substitute(self, images: Callable[[object], "Poly | None"]) -> "Poly":
        """Algebra map sending each generator g to images(g) (None keeps g)."""
        alg = self.alg
        acc = Poly(alg)
        cache: dict = {}
        for mono, c in self.terms.items():
            term = alg.const(c)
            for g, e in mono:
                img = cache.get(g)
                if img is None:
                    img = images(g)
                    if img is None:
                        img = alg.gen(g)
                    cache[g] = img
                for _ in range(e):
                    term = term * img
                    if not term:
                        break
                if not term:
                    break
            acc = acc + term
        return acc

    def split_left(self, is_left: Callable[[object], bool]) -> dict:
        """Write the polynomial as ``sum L_k * R_k`` with L in the chosen generators.

        Returns ``{left monomial: right Poly}``; signs account for moving the
        chosen generators to the front.
        """
        alg = self.alg
        out: dict = {}
        for mono, c in self.terms.items():
            left = []
            right = []
            sign = 1
            odd_right = 0
            for g, e in mono:
                if is_left(g):
                    if alg.parity(g) and odd_right & 1:
                        sign = -sign
                    left.append((g, e))
                else:
                    right.append((g, e))
                    if alg.parity(g):
                        odd_right += 1
            key = tuple(left)
            p = out.get(key)
            piece = Poly(alg, {tuple(right): c * sign})
            out[key] = piece if p is None else p + piece
        return {k: v for k, v in out.items() if v}

    def split_right(self, is_right: Callable[[object], bool]) -> dict:
        """Like ``split_left`` but with the chosen generators moved to the back."""
        alg = self.alg
        out: dict = {}
        for mono, c in self.terms.items():
            left = []
            right = []
            sign = 1
            odd_left_after = 0
            # moving a right-generator past every later odd left-generator
            rev = list(mono)
            for g, e in reversed(rev):
                if is_right(g):
                    if alg.parity(g) and odd_left_after & 1:
                        sign = -sign
                    right.append((g, e))
                else:
                    left.append((g, e))
                    if alg.parity(g):
                        odd_left_after += 1
            key = tuple(reversed(right))
            p = out.get(key)
            piece = Poly(alg, {tuple(reversed(left)): c * sign})
            out[key] = piece if p is None else p + piece
        return {k: v for k, v in out.items() if v}

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in sorted(self.terms.items(), key=lambda t: repr(t[0])):
            body = "*".join(f"{g}" + (f"^{e}" if e > 1 else "") for g, e in mono)
            parts.append(f"{c}" + ("*" + body if body else ""))
        return " + ".join(parts)


def poly_sum(items: Iterable[Poly], alg: SuperAlgebra) -> Poly:
    acc = alg.zero()
    for p in items:
        acc = acc + p
    return acc
