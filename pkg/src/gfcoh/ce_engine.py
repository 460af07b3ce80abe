"""Chevalley-Eilenberg complexes of vect(n) and of finite Lie algebras.

Two representations of cochains live here.

``TrivialCochain`` is a sparse dictionary on strictly increasing tuples of
monomial fields (the dual basis, determinant convention: the cochain
``e^S`` takes the value 1 on the sorted tuple ``S``).  Weight-zero slices
of the trivial-coefficient complex are finite, so these are honest finite
vectors.

``FormCochain`` is a functional, form-valued cochain: a rule sending a
sorted tuple of monomial fields to a ``FormalForm``.  Weight-zero cochains
with function or form coefficients are infinite-dimensional, so they are
only ever evaluated, and identities between them are checked on every
monomial tuple up to a jet bound.

The differential is

    (d phi)(X_0..X_q) = sum_i (-1)^i L_{X_i} phi(..^i..)
                        + sum_{i<j} (-1)^{i+j} phi([X_i, X_j], ..^i..^j..)

and the total differential on ``C^q(Omega^p)`` is ``d + (-1)^q d_dR``.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Callable, Iterable, Mapping, Sequence

from .exact_linalg import Lin, SparseMatrix, rank, solve_preimage
from .formal_calculus import (
    FormalForm,
    FormalVectorField,
    MonomialField,
    bracket_monomials,
    de_rham,
    field_basis,
    lie_derivative,
    monomials_of_degree,
)

__all__ = [
    "EngineConfig",
    "ResourceLimitError",
    "canonical_tuple",
    "weight_tuples",
    "TrivialCochain",
    "ComplexSlice",
    "build_slice",
    "build_weight_zero_slice",
    "euler_homotopy_matrix",
    "BettiTable",
    "betti",
    "FiniteLieAlgebra",
    "gl_algebra",
    "exterior_dual_module",
    "finite_ce_complex",
    "gl_complex_betti",
    "FormCochain",
    "TotalCochain",
    "ce_differential",
    "total_differential",
    "include_trivial",
    "generic_cochain",
    "CocycleCertificate",
    "is_cocycle",
    "coboundary_witness",
    "tuples_up_to",
]


class ResourceLimitError(RuntimeError):
    """A slice exceeded the configured size cap."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class EngineConfig:
    max_slice_dim: int = 50_000
    threads: int | None = None

    def __post_init__(self):
        if self.max_slice_dim <= 0:
            raise ValueError("max_slice_dim must be positive")

    def worker_count(self) -> int:
        if self.threads is not None:
            return max(1, self.threads)
        env = os.environ.get("GF_ENGINE_THREADS")
        if env:
            try:
                return max(1, int(env))
            except ValueError:
                pass
        return 1


# -- tuples --------------------------------------------------------------------

def _sort_sign(seq: Sequence) -> tuple[int, tuple]:
    """Sign of the sorting permutation and the sorted tuple; sign 0 on repeats."""
    items = list(seq)
    sign = 1
    # insertion sort: small tuples, and we need the parity anyway
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and items[j - 1] == items[j]:
            return 0, ()
    return sign, tuple(items)


def canonical_tuple(fields: Sequence[MonomialField]) -> tuple[int, tuple]:
    return _sort_sign(fields)


@lru_cache(maxsize=None)
def _fields_by_weight(n: int, w: int) -> tuple:
    return tuple(MonomialField(w + 1, a, i) for a in monomials_of_degree(n, w + 1) for i in range(n))


@lru_cache(maxsize=None)
def weight_tuples(n: int, q: int, w: int) -> tuple:
    """Strictly increasing q-tuples of monomial fields of total weight w."""
    if q == 0:
        return ((),) if w == 0 else ()
    out = []

    def rec(prefix, min_field, k, budget):
        if k == 0:
            if budget == 0:
                out.append(tuple(prefix))
            return
        # fields come in weight order, so k * (next weight) <= budget
        lo = -1 if min_field is None else min_field.weight
        hi = budget // k
        for wt in range(lo, hi + 1):
            for m in _fields_by_weight(n, wt):
                if min_field is not None and m <= min_field:
                    continue
                prefix.append(m)
                rec(prefix, m, k - 1, budget - wt)
                prefix.pop()

    rec([], None, q, w)
    out.sort()
    return tuple(out)


def tuples_up_to(n: int, q: int, max_order: int) -> Iterable[tuple]:
    """All strictly increasing q-tuples of fields with ``|a| <= max_order``."""
    return combinations(field_basis(n, max_order), q)


# -- trivial-coefficient cochains ------------------------------------------------

def _vf(m: MonomialField) -> FormalVectorField:
    return FormalVectorField(m.n, {m: Fraction(1)})


def _expand(fields: Sequence) -> list[tuple[object, tuple]]:
    """Multilinear expansion of field arguments into monomial tuples."""
    acc = [(Fraction(1), ())]
    for X in fields:
        if isinstance(X, MonomialField):
            terms = [(X, Fraction(1))]
        else:
            terms = list(X.terms.items())
        acc = [(c * cx, t + (m,)) for c, t in acc for m, cx in terms]
    return acc


@lru_cache(maxsize=None)
def _dual_bracket(k: MonomialField) -> tuple:
    """Pairs a < b with the coefficient of k in [a, b]."""
    out = []
    n = k.n
    for oa in range(0, k.order + 2):
        ob = k.order + 1 - oa
        if ob < oa:
            break
        for a in _fields_by_weight(n, oa - 1):
            for b in _fields_by_weight(n, ob - 1):
                if not a < b:
                    continue
                for m, c in bracket_monomials(a, b):
                    if m == k:
                        out.append((a, b, c))
    return tuple(out)


class TrivialCochain:
    """Sparse cochain with trivial coefficients on the dual monomial basis.

    Coefficients are usually ``Fraction`` but any additive type scaled by
    rationals works (``Lin`` is used for symbolic checks).
    """

    __slots__ = ("n", "degree", "terms")

    def __init__(self, n: int, degree: int, terms: Mapping[tuple, object] | None = None):
        self.n = n
        self.degree = degree
        clean = {}
        for t, c in (terms or {}).items():
            if len(t) != degree:
                raise ValueError(f"tuple {t} does not have length {degree}")
            s, key = _sort_sign(t)
            if not s or not c:
                continue
            v = clean.get(key, 0) + (c if s > 0 else -c)
            if v:
                clean[key] = v
            else:
                clean.pop(key, None)
        self.terms = clean

    @classmethod
    def from_vector(cls, n: int, degree: int, basis: Sequence[tuple], vec: Sequence) -> "TrivialCochain":
        return cls(n, degree, {t: v for t, v in zip(basis, vec) if v})

    def to_vector(self, basis: Sequence[tuple]) -> list:
        index = {t: i for i, t in enumerate(basis)}
        vec = [Fraction(0)] * len(basis)
        for t, c in self.terms.items():
            if t not in index:
                raise KeyError(f"tuple {t} is outside the given basis")
            vec[index[t]] = c
        return vec

    def on_monomials(self, fields: Sequence[MonomialField]):
        s, key = _sort_sign(fields)
        if not s:
            return 0
        c = self.terms.get(key, 0)
        return c if s > 0 else -c

    def __call__(self, *fields):
        if len(fields) != self.degree:
            raise ValueError(f"expected {self.degree} arguments")
        total = 0
        for c, t in _expand(fields):
            v = self.on_monomials(t)
            if v:
                total = total + c * v
        return total

    def __add__(self, other: "TrivialCochain") -> "TrivialCochain":
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, 0) + v
        return TrivialCochain(self.n, self.degree, acc)

    def __neg__(self):
        return TrivialCochain(self.n, self.degree, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        return TrivialCochain(self.n, self.degree, {k: c * v for k, v in self.terms.items()})

    def __eq__(self, other):
        if not isinstance(other, TrivialCochain):
            return NotImplemented
        return self.degree == other.degree and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def weights(self) -> set:
        return {sum(m.weight for m in t) for t in self.terms}

    def differential(self) -> "TrivialCochain":
        """``d`` as a derivation: ``d e^k = -sum_{a<b} c^k_ab e^a e^b``."""
        acc: dict = {}
        for S, c in self.terms.items():
            for r, k in enumerate(S):
                sgn = -1 if r & 1 else 1
                for a, b, ck in _dual_bracket(k):
                    t = S[:r] + (a, b) + S[r + 1:]
                    s, key = _sort_sign(t)
                    if not s:
                        continue
                    v = -ck * c * (s * sgn)
                    acc[key] = acc.get(key, 0) + v
        return TrivialCochain(self.n, self.degree + 1, acc)

    def __repr__(self):
        body = " + ".join(f"{c}*e{tuple(str(m) for m in t)}" for t, c in sorted(self.terms.items()))
        return body or "0"


# -- slices --------------------------------------------------------------------

def _row_differential(source: Sequence[tuple], target: Sequence[tuple]) -> SparseMatrix:
    """Matrix of d from span(source) to span(target) by evaluating on rows."""
    col = {t: i for i, t in enumerate(source)}
    entries: dict = {}
    for r, T in enumerate(target):
        q1 = len(T)
        for i in range(q1):
            for j in range(i + 1, q1):
                rest = T[:i] + T[i + 1:j] + T[j + 1:]
                base = -1 if (i + j) & 1 else 1
                for m, c in bracket_monomials(T[i], T[j]):
                    s, key = _sort_sign((m,) + rest)
                    if not s:
                        continue
                    ci = col.get(key)
                    if ci is None:
                        continue
                    entries[(r, ci)] = entries.get((r, ci), 0) + base * s * c
    return SparseMatrix(len(target), len(source), entries)


@dataclass(frozen=True)
class ComplexSlice:
    """Degree-q, weight-w piece of the trivial complex and its differential."""

    n: int
    q: int
    w: int
    basis: tuple
    target_basis: tuple
    differential: SparseMatrix

    @property
    def dim(self) -> int:
        return len(self.basis)

    def index(self, t: tuple) -> int:
        return self.basis.index(t)

    def cochain(self, vec) -> TrivialCochain:
        return TrivialCochain.from_vector(self.n, self.q, self.basis, vec)


def build_slice(n: int, q: int, w: int = 0, reduced: bool = True,
                config: EngineConfig | None = None) -> ComplexSlice:
    config = config or EngineConfig()
    if n < 1 or q < 0:
        raise ValueError("need n >= 1 and q >= 0")
    basis = weight_tuples(n, q, w)
    if reduced and q == 0:
        basis = ()
    target = weight_tuples(n, q + 1, w)
    for size in (len(basis), len(target)):
        if size > config.max_slice_dim:
            raise ResourceLimitError(f"slice (n={n}, q={q}, w={w}) has dimension {size}")
    return ComplexSlice(n, q, w, basis, target, _row_differential(basis, target))


def build_weight_zero_slice(n: int, q: int, config: EngineConfig | None = None) -> ComplexSlice:
    return build_slice(n, q, 0, True, config)


def euler_homotopy_matrix(n: int, q: int, w: int) -> SparseMatrix:
    """``h = -(1/w) iota_E`` from weight-w degree-q cochains to degree q-1.

    ``(iota_E phi)(X_1..) = phi(E, X_1, ..)``; since ``L_E = -w`` on a
    weight-w cochain, ``dh + hd = id`` there.
    """
    if w == 0:
        raise ValueError("the Euler homotopy needs a nonzero weight")
    source = weight_tuples(n, q, w)
    target = weight_tuples(n, q - 1, w) if q >= 1 else ()
    col = {t: i for i, t in enumerate(source)}
    euler = [MonomialField(1, tuple(int(j == i) for j in range(n)), i) for i in range(n)]
    entries = {}
    scale = Fraction(-1, w)
    for r, T in enumerate(target):
        for e in euler:
            s, key = _sort_sign((e,) + T)
            if s and key in col:
                entries[(r, col[key])] = entries.get((r, col[key]), 0) + s * scale
    return SparseMatrix(len(target), len(source), entries)


# -- Betti numbers --------------------------------------------------------------

@dataclass
class BettiTable:
    n: int
    dims: dict
    reduced: bool = True
    coefficients: str = "trivial"
    metadata: dict = field(default_factory=dict)
    complete: bool = True

    def __getitem__(self, q):
        return self.dims[q]

    def as_list(self, degrees: Iterable[int]) -> list:
        return [self.dims[q] for q in degrees]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "reduced": self.reduced,
            "coefficients": self.coefficients,
            "complete": self.complete,
            "table": [{"degree": q, "dim": d} for q, d in sorted(self.dims.items())],
            "metadata": dict(self.metadata),
        }


def _slice_rank(args):
    n, q, config, corrupt = args
    sl = build_weight_zero_slice(n, q, config)
    m = sl.differential
    if corrupt and m.rows and m.cols:
        m = m + SparseMatrix(m.rows, m.cols, {(0, 0): 1})
    return q, sl.dim, rank(m), m.max_bits()


def betti(n: int, q_max: int, config: EngineConfig | None = None, corrupt_degree: int | None = None) -> BettiTable:
    """Reduced Betti numbers of vect(n) in degrees 1..q_max from weight-zero slices.

    ``corrupt_degree`` perturbs one differential; it exists only so the
    comparison tooling can be tested against a known-bad run.
    """
    config = config or EngineConfig()
    if q_max < 1:
        raise ValueError("q_max must be at least 1")
    jobs = [(n, q, config, q == corrupt_degree) for q in range(1, q_max + 1)]
    dims: dict = {}
    ranks: dict = {0: 0}
    bits = 0
    failed = None
    workers = config.worker_count()
    try:
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_slice_rank, jobs))
        else:
            results = [_slice_rank(j) for j in jobs]
    except ResourceLimitError as exc:
        failed = exc
        results = []
        for j in jobs:
            try:
                results.append(_slice_rank(j))
            except ResourceLimitError:
                break
    for q, dim, rk, b in results:
        dims[q] = dim
        ranks[q] = rk
        bits = max(bits, b)
    table = {}
    for q in range(1, q_max + 1):
        if q in ranks and q - 1 in ranks:
            table[q] = dims[q] - ranks[q] - ranks[q - 1]
    meta = {
        "slice_dims": {q: dims[q] for q in sorted(dims)},
        "ranks": {q: ranks[q] for q in sorted(ranks) if q},
        "max_bits": bits,
        "weight": 0,
    }
    out = BettiTable(n, table, True, "trivial", meta, failed is None)
    if failed is not None:
        raise ResourceLimitError(str(failed), out)
    return out


# -- finite Lie algebras ----------------------------------------------------------

@dataclass(frozen=True)
class FiniteLieAlgebra:
    """Structure constants ``[x_a, x_b] = sum_k c[a, b][k] x_k`` and a module."""

    dim: int
    brackets: Mapping
    module_dim: int = 1
    action: tuple = ()
    labels: tuple = ()

    def bracket(self, a: int, b: int) -> dict:
        if a == b:
            return {}
        if a < b:
            return dict(self.brackets.get((a, b), {}))
        return {k: -v for k, v in self.brackets.get((b, a), {}).items()}


def gl_algebra(n: int) -> FiniteLieAlgebra:
    """gl(n) on ``E_ij`` (index ``i*n + j``) with ``[E_ij, E_kl] = d_jk E_il - d_li E_kj``."""
    N = n * n
    br = {}
    for a in range(N):
        i, j = divmod(a, n)
        for b in range(a + 1, N):
            k, l = divmod(b, n)
            out = {}
            if j == k:
                out[i * n + l] = out.get(i * n + l, 0) + 1
            if l == i:
                out[k * n + j] = out.get(k * n + j, 0) - 1
            out = {x: v for x, v in out.items() if v}
            if out:
                br[(a, b)] = out
    labels = tuple(f"E{i + 1}{j + 1}" for i in range(n) for j in range(n))
    return FiniteLieAlgebra(N, br, 1, (), labels)


def exterior_dual_module(n: int, p: int, dual: bool = True) -> tuple[int, tuple]:
    """Action matrices of gl(n) on ``Lambda^p`` of the dual (or standard) representation.

    On the dual basis ``E_ij . eps^k = -d_ki eps^j``; on the standard basis
    ``E_ij . e_k = d_jk e_i``.  Both extend as derivations of the wedge.
    Returns the module dimension and one sparse matrix (dict) per basis element.
    """
    subsets = list(combinations(range(n), p))
    index = {s: r for r, s in enumerate(subsets)}
    mats = []
    for a in range(n * n):
        i, j = divmod(a, n)
        mat = {}
        for c, K in enumerate(subsets):
            for pos, k in enumerate(K):
                if dual:
                    if k != i:
                        continue
                    new, coeff = j, -1
                else:
                    if k != j:
                        continue
                    new, coeff = i, 1
                L = K[:pos] + (new,) + K[pos + 1:]
                s, key = _sort_sign(L)
                if not s:
                    continue
                r = index[key]
                mat[(r, c)] = mat.get((r, c), 0) + coeff * s
        mats.append({k: v for k, v in mat.items() if v})
    return len(subsets), tuple(mats)


def finite_ce_complex(g: FiniteLieAlgebra, q: int) -> tuple[list, list, SparseMatrix]:
    """Bases of ``C^q``, ``C^{q+1}`` (pairs (subset, module index)) and d between them."""
    M = g.module_dim
    src = [(S, m) for S in combinations(range(g.dim), q) for m in range(M)]
    tgt = [(T, m) for T in combinations(range(g.dim), q + 1) for m in range(M)]
    col = {b: i for i, b in enumerate(src)}
    entries: dict = {}
    for r, (T, mo) in enumerate(tgt):
        for i, t in enumerate(T):
            if not g.action:
                break
            rest = T[:i] + T[i + 1:]
            sgn = -1 if i & 1 else 1
            for (ro, ci), v in g.action[t].items():
                if ro != mo:
                    continue
                c = col.get((rest, ci))
                if c is not None:
                    entries[(r, c)] = entries.get((r, c), 0) + sgn * v
        for i in range(len(T)):
            for j in range(i + 1, len(T)):
                rest = T[:i] + T[i + 1:j] + T[j + 1:]
                base = -1 if (i + j) & 1 else 1
                for k, v in g.bracket(T[i], T[j]).items():
                    s, key = _sort_sign((k,) + rest)
                    if not s:
                        continue
                    c = col.get((key, mo))
                    if c is not None:
                        entries[(r, c)] = entries.get((r, c), 0) + base * s * v
    return src, tgt, SparseMatrix(len(tgt), len(src), entries)


def gl_complex_betti(n: int, p: int, q_max: int | None = None, dual: bool = True) -> BettiTable:
    """Betti numbers of ``H(gl(n); Lambda^p (C^n)^*)`` in degrees 0..q_max."""
    g = gl_algebra(n)
    if q_max is None:
        q_max = g.dim
    M, action = exterior_dual_module(n, p, dual)
    if p > 0 or M != 1:
        g = FiniteLieAlgebra(g.dim, g.brackets, M, action, g.labels)
    ranks = {-1: 0}
    dims = {}
    for q in range(0, q_max + 1):
        src, _, mat = finite_ce_complex(g, q)
        dims[q] = len(src)
        ranks[q] = rank(mat)
    table = {q: dims[q] - ranks[q] - ranks[q - 1] for q in range(q_max + 1)}
    return BettiTable(n, table, False, f"gl-module Lambda^{p}" + ("*" if dual else ""),
                      {"lie_algebra": f"gl({n})", "module_dim": M})


# -- form-valued functional cochains ----------------------------------------------

class FormCochain:
    """Alternating cochain of degree q with ``FormalForm`` values.

    ``rule`` receives a strictly increasing tuple of monomial fields and
    returns the value there; results are cached.
    """

    __slots__ = ("n", "degree", "_rule", "_cache", "name", "form_degree")

    def __init__(self, n: int, degree: int, rule: Callable[[tuple], FormalForm],
                 name: str | None = None, form_degree: int | None = None):
        self.n = n
        self.degree = degree
        self._rule = rule
        self._cache: dict = {}
        self.name = name
        # None means unknown or mixed
        self.form_degree = form_degree

    def on_sorted(self, T: tuple) -> FormalForm:
        v = self._cache.get(T)
        if v is None:
            v = self._rule(T)
            if not isinstance(v, FormalForm):
                v = FormalForm.constant(self.n, v) if v else FormalForm.zero(self.n)
            self._cache[T] = v
        return v

    def on_monomials(self, fields: Sequence[MonomialField]) -> FormalForm:
        s, key = _sort_sign(fields)
        if not s:
            return FormalForm.zero(self.n)
        v = self.on_sorted(key)
        return v if s > 0 else -v

    def __call__(self, *fields) -> FormalForm:
        if len(fields) != self.degree:
            raise ValueError(f"expected {self.degree} arguments, got {len(fields)}")
        total = FormalForm.zero(self.n)
        for c, t in _expand(fields):
            v = self.on_monomials(t)
            if v:
                total = total + v.scale(c)
        return total

    def __add__(self, other: "FormCochain") -> "FormCochain":
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        fd = self.form_degree if self.form_degree == other.form_degree else None
        return FormCochain(self.n, self.degree, lambda T: self.on_sorted(T) + other.on_sorted(T), None, fd)

    def __neg__(self):
        return FormCochain(self.n, self.degree, lambda T: -self.on_sorted(T), self.name, self.form_degree)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "FormCochain":
        return FormCochain(self.n, self.degree, lambda T: self.on_sorted(T).scale(c), self.name, self.form_degree)

    def __rmul__(self, c):
        return self.scale(c)

    def map_values(self, f: Callable[[FormalForm], FormalForm], form_degree: int | None = None) -> "FormCochain":
        return FormCochain(self.n, self.degree, lambda T: f(self.on_sorted(T)), None, form_degree)

    def __repr__(self):
        return f"FormCochain(n={self.n}, q={self.degree}{', ' + self.name if self.name else ''})"


def include_trivial(phi: TrivialCochain) -> FormCochain:
    """The inclusion of trivial cochains as constant-valued cochains."""
    return FormCochain(phi.n, phi.degree, lambda T: FormalForm.constant(phi.n, phi.terms.get(T, 0)) if T in phi.terms else FormalForm.zero(phi.n), "i(phi)", 0)


def ce_differential(phi: FormCochain) -> FormCochain:
    n, q = phi.n, phi.degree

    def rule(T):
        acc = FormalForm.zero(n)
        for i in range(q + 1):
            rest = T[:i] + T[i + 1:]
            v = phi.on_sorted(rest)
            if v:
                lv = lie_derivative(_vf(T[i]), v)
                acc = acc + (lv if i % 2 == 0 else -lv)
        for i in range(q + 1):
            for j in range(i + 1, q + 1):
                rest = T[:i] + T[i + 1:j] + T[j + 1:]
                base = -1 if (i + j) & 1 else 1
                for m, c in bracket_monomials(T[i], T[j]):
                    v = phi.on_monomials((m,) + rest)
                    if v:
                        acc = acc + v.scale(base * c)
        return acc

    return FormCochain(n, q + 1, rule, "d(" + (phi.name or "?") + ")", phi.form_degree)


class TotalCochain:
    """Element of the total complex: a finite family of FormCochains keyed by q."""

    __slots__ = ("n", "parts")

    def __init__(self, n: int, parts: Mapping[int, FormCochain] | None = None):
        self.n = n
        self.parts = dict(parts or {})

    @classmethod
    def of(cls, phi: FormCochain) -> "TotalCochain":
        return cls(phi.n, {phi.degree: phi})

    def __add__(self, other: "TotalCochain") -> "TotalCochain":
        parts = dict(self.parts)
        for q, c in other.parts.items():
            parts[q] = parts[q] + c if q in parts else c
        return TotalCochain(self.n, parts)

    def __neg__(self):
        return TotalCochain(self.n, {q: -c for q, c in self.parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "TotalCochain":
        return TotalCochain(self.n, {q: p.scale(c) for q, p in self.parts.items()})

    def evaluate(self, T: tuple) -> FormalForm:
        part = self.parts.get(len(T))
        return part.on_sorted(T) if part is not None else FormalForm.zero(self.n)


def total_differential(a) -> TotalCochain:
    """``D = d_CE + (-1)^q d_dR`` on each component."""
    if isinstance(a, FormCochain):
        a = TotalCochain.of(a)
    out = TotalCochain(a.n)
    for q, phi in a.parts.items():
        sgn = -1 if q & 1 else 1
        out = out + TotalCochain.of(ce_differential(phi))
        fd = None if phi.form_degree is None else phi.form_degree + 1
        out = out + TotalCochain.of(phi.map_values(lambda v, s=sgn: de_rham(v).scale(s), fd))
    return out


def generic_cochain(n: int, q: int, p: int, max_weight: int | None = None) -> FormCochain:
    """Weight-zero cochain in ``C^q(Omega^p)`` with an independent symbol per coordinate.

    The coordinate ``(T, beta, I)`` is the coefficient of ``x^beta dx_I`` in
    the value on the sorted tuple T.  Any weight-zero cochain is obtained by
    specialising the symbols, so a linear identity that holds for this one
    holds for all of them.  ``max_weight`` drops coordinates of higher form
    weight (useful when only low-order Taylor data can matter).
    """

    def rule(T):
        wt = sum(m.weight for m in T)
        d = wt - p
        if d < 0 or (max_weight is not None and wt > max_weight):
            return FormalForm.zero(n)
        terms = {}
        for beta in monomials_of_degree(n, d):
            for I in combinations(range(n), p):
                terms[(beta, I)] = Lin.symbol((T, beta, I))
        return FormalForm(n, terms)

    return FormCochain(n, q, rule, f"G({q},{p})", p)


# -- cocycle checks and witnesses ----------------------------------------------

@dataclass
class CocycleCertificate:
    holds: bool
    jet_bound: int
    margin: int
    tuples_checked: int
    stabilized: bool
    witness: tuple | None = None
    total: bool = False

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "jet_bound": self.jet_bound,
            "margin": self.margin,
            "tuples_checked": self.tuples_checked,
            "stabilized": self.stabilized,
            "witness": None if self.witness is None else [str(m) for m in self.witness],
            "total": self.total,
        }


def _first_failure(evaluate: Callable[[tuple], object], n: int, q: int, bound: int, low: int):
    """Scan all q-tuples of order <= bound; report count and first failures."""
    count = 0
    low_fail = high_fail = None
    for T in tuples_up_to(n, q, bound):
        count += 1
        if evaluate(T):
            if max(m.order for m in T) <= low:
                return count, T, T
            if high_fail is None:
                high_fail = T
    return count, low_fail, high_fail


def is_cocycle(phi, total: bool = False, jet_bound: int | None = None, margin: int = 1) -> tuple[bool, CocycleCertificate]:
    """Exact closedness check on every monomial tuple up to a jet bound.

    The scan runs at ``jet_bound + margin + 1``; the verdict at
    ``jet_bound + margin`` must agree with it (``stabilized``).  With
    ``total`` the de Rham component of ``D`` is checked as well.
    """
    if isinstance(phi, TrivialCochain):
        phi = include_trivial(phi)
    n, q = phi.n, phi.degree
    if jet_bound is None:
        jet_bound = q + 1
    low = jet_bound + margin
    high = low + 1
    d = ce_differential(phi)
    checked = 0
    count, low_fail, high_fail = _first_failure(d.on_sorted, n, q + 1, high, low)
    checked += count
    if total and low_fail is None:
        count, lf, hf = _first_failure(lambda T: de_rham(phi.on_sorted(T)), n, q, high, low)
        checked += count
        low_fail = lf
        high_fail = high_fail or hf
    holds = low_fail is None and high_fail is None
    stabilized = (low_fail is None) == (high_fail is None)
    cert = CocycleCertificate(holds, jet_bound, margin, checked, stabilized,
                              low_fail or high_fail, total)
    return holds, cert


def coboundary_witness(phi: TrivialCochain, sl: ComplexSlice) -> TrivialCochain | None:
    """psi in the slice with ``d psi = phi``, or None when phi is not exact there."""
    if phi.degree != sl.q + 1:
        raise ValueError(f"cochain of degree {phi.degree} cannot be hit from degree {sl.q}")
    try:
        b = phi.to_vector(sl.target_basis)
    except KeyError as exc:
        raise ValueError("cochain is not expressible in the slice basis") from exc
    if not any(b):
        return TrivialCochain(sl.n, sl.q)
    x = solve_preimage(sl.differential, b)
    if x is None:
        return None
    return sl.cochain(x)
