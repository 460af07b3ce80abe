"""Generator cochains ``a_i`` and ``tau_i``, products, and the map to trivial cochains.

Normalisations:

* ``a_k(X_1..X_m) = sum_sigma sgn(sigma) Tr(J X_s1 ... J X_sm)`` with
  ``m = 2k - 1`` and ``J(X)_ij = d_i f_j``; no ``1/m!``.
* ``tau_k(X_1..X_k) = sum_sigma sgn(sigma) Tr(dJX_s1 ^ ... ^ dJX_sk)``.
* For ``alpha`` in ``C^q(Omega^p)`` and ``beta`` in ``C^q'(Omega^p')`` the
  product is ``(alpha beta)(X) = (-1)^{p q'} sum_shuffles sgn alpha(X_I) ^ beta(X_J)``,
  which is a derivation for ``D = d + (-1)^q d_dR``.
* ``iota`` moves one input into the form slot:
  ``(iota phi)(X_1..X_{q+1}) = sum_k (-1)^{k+1} iota_{X_k} phi(..X_k omitted..)``.
* ``Phi(alpha) = eps(p, q) (iota^p / p!) alpha |_0`` with
  ``eps = (-1)^{pq + p(p+1)/2}``.  This is evaluation at the origin after
  ``exp(-iota_s)``, where ``iota_s = (-1)^q iota`` on ``C^q``; the sign is what
  makes ``Phi`` a multiplicative chain map for the conventions above.
* ``Psi = -exp(iota_s) K_s exp(-iota_s)`` with ``K_s = (-1)^q K`` and ``K`` the
  radial homotopy on values, so that ``i Phi - id = D Psi + Psi D``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations
from math import factorial
from typing import Sequence

from .ce_engine import (
    EngineConfig,
    FormCochain,
    TotalCochain,
    TrivialCochain,
    build_weight_zero_slice,
    coboundary_witness,
    is_cocycle,
    weight_tuples,
    _sort_sign,
)
from .exact_linalg import rank
from .formal_calculus import (
    FormalForm,
    FormalVectorField,
    MonomialField,
    contract,
    de_rham,
    radial_homotopy,
)

__all__ = [
    "GeneratorClass",
    "ClassExpression",
    "ClassParseError",
    "a_class",
    "tau_class",
    "cup_product",
    "iota_operator",
    "iota_power",
    "exp_iota",
    "phi_value",
    "phi_map",
    "phi_on_slice",
    "psi_homotopy",
    "parse_class",
    "realize",
    "wronskian_cocycle",
    "scalar_ratio",
    "RingReport",
    "verify_ring_presentation",
]


# -- Jacobian matrices of monomial fields -----------------------------------------

@lru_cache(maxsize=None)
def _jacobian_entries(m: MonomialField) -> tuple:
    """Nonzero entries ``(i, j, form)`` of J for a monomial field; only column j = direction."""
    out = []
    j = m.direction
    for i, e in enumerate(m.exponent):
        if e:
            beta = list(m.exponent)
            beta[i] -= 1
            out.append((i, j, FormalForm(m.n, {(tuple(beta), ()): Fraction(e)})))
    return tuple(out)


@lru_cache(maxsize=None)
def _djacobian_entries(m: MonomialField) -> tuple:
    out = []
    for i, j, f in _jacobian_entries(m):
        df = de_rham(f)
        if df:
            out.append((i, j, df))
    return tuple(out)


def _trace_of_product(mats: Sequence[tuple], n: int) -> FormalForm:
    """Trace of a product of sparse matrices given as entry lists."""
    # propagate row vectors e_r through the product
    total = FormalForm.zero(n)
    if not mats:
        return FormalForm.constant(n, n)
    for r in range(n):
        vec = {r: FormalForm.constant(n, 1)}
        for mat in mats:
            new: dict = {}
            for i, j, f in mat:
                v = vec.get(i)
                if v is None:
                    continue
                w = v.wedge(f)
                if w:
                    new[j] = new[j] + w if j in new else w
            vec = new
            if not vec:
                break
        if r in vec:
            total = total + vec[r]
    return total


def _perm_sign(p: Sequence[int]) -> int:
    s, _ = _sort_sign(p)
    return s


@lru_cache(maxsize=None)
def _signed_perms(k: int) -> tuple:
    return tuple((p, _perm_sign(p)) for p in permutations(range(k)))


def _antisym_trace(T: tuple, entries, n: int) -> FormalForm:
    mats = [entries(m) for m in T]
    total = FormalForm.zero(n)
    for p, s in _signed_perms(len(T)):
        t = _trace_of_product([mats[i] for i in p], n)
        if t:
            total = total + (t if s > 0 else -t)
    return total


@dataclass(frozen=True)
class GeneratorClass:
    kind: str
    index: int
    n: int
    cochain: FormCochain = field(compare=False)

    @property
    def bidegree(self) -> tuple[int, int]:
        """(form degree p, cochain degree q)."""
        return (self.cochain.form_degree, self.cochain.degree)

    def __str__(self):
        return f"{'a' if self.kind == 'a' else 't'}{self.index}"


def _check_index(n: int, i: int):
    if n < 1:
        raise ValueError("n must be positive")
    if not 1 <= i <= n:
        raise ValueError(f"generator index {i} outside 1..{n}")


def a_class(n: int, i: int) -> GeneratorClass:
    _check_index(n, i)
    k = 2 * i - 1
    rule = lambda T: _antisym_trace(T, _jacobian_entries, n)
    return GeneratorClass("a", i, n, FormCochain(n, k, rule, f"a{i}", 0))


def tau_class(n: int, i: int) -> GeneratorClass:
    _check_index(n, i)
    rule = lambda T: _antisym_trace(T, _djacobian_entries, n)
    return GeneratorClass("tau", i, n, FormCochain(n, i, rule, f"t{i}", i))


# -- products and contractions ----------------------------------------------------

def _koszul_split(v: FormalForm, q2: int) -> FormalForm:
    """Apply ``(-1)^{p q2}`` degreewise."""
    if not q2 & 1:
        return v
    return FormalForm(v.n, {k: (-c if len(k[1]) & 1 else c) for k, c in v.terms.items()})


@lru_cache(maxsize=None)
def _shuffles(k: int, q1: int) -> tuple:
    out = []
    for I in combinations(range(k), q1):
        J = tuple(x for x in range(k) if x not in I)
        out.append((I, J, _perm_sign(I + J)))
    return tuple(out)


def cup_product(alpha: FormCochain, beta: FormCochain) -> FormCochain:
    if alpha.n != beta.n:
        raise ValueError("dimension mismatch")
    n, q1, q2 = alpha.n, alpha.degree, beta.degree
    fd = None
    if alpha.form_degree is not None and beta.form_degree is not None:
        fd = alpha.form_degree + beta.form_degree

    def rule(T):
        acc = FormalForm.zero(n)
        for I, J, s in _shuffles(q1 + q2, q1):
            a = alpha.on_sorted(tuple(T[i] for i in I))
            if not a:
                continue
            b = beta.on_sorted(tuple(T[j] for j in J))
            if not b:
                continue
            w = _koszul_split(a, q2).wedge(b)
            acc = acc + (w if s > 0 else -w)
        return acc

    name = f"{alpha.name or '?'}*{beta.name or '?'}"
    return FormCochain(n, q1 + q2, rule, name, fd)


def _vf(m: MonomialField) -> FormalVectorField:
    return FormalVectorField(m.n, {m: Fraction(1)})


def iota_operator(phi: FormCochain) -> FormCochain:
    if phi.form_degree == 0:
        raise ValueError("iota needs form-valued cochains of positive degree")
    n, q = phi.n, phi.degree
    fd = None if phi.form_degree is None else phi.form_degree - 1

    def rule(T):
        acc = FormalForm.zero(n)
        for k in range(q + 1):
            v = phi.on_sorted(T[:k] + T[k + 1:])
            if v:
                c = contract(_vf(T[k]), v)
                acc = acc + (c if k % 2 == 0 else -c)
        return acc

    return FormCochain(n, q + 1, rule, f"iota({phi.name or '?'})", fd)


def _contract_chain(fields: Sequence[MonomialField], v: FormalForm) -> FormalForm:
    """``iota_{f_0} iota_{f_1} ... iota_{f_last} v`` (first field outermost)."""
    for m in reversed(fields):
        if not v:
            break
        v = contract(_vf(m), v)
    return v


def iota_power(phi: FormCochain, p: int) -> FormCochain:
    """``iota^p / p!`` in closed form: one term per increasing index set."""
    n, q = phi.n, phi.degree

    def rule(T):
        acc = FormalForm.zero(n)
        for I, J, s in _shuffles(q + p, p):
            v = phi.on_sorted(tuple(T[j] for j in J))
            if not v:
                continue
            c = _contract_chain([T[i] for i in I], v)
            if c:
                acc = acc + (c if s > 0 else -c)
        return acc

    fd = None if phi.form_degree is None else phi.form_degree - p
    return FormCochain(n, q + p, rule, f"iota^{p}/{p}!", fd)


def exp_iota(a, sign: int = 1) -> TotalCochain:
    """``exp(sign * iota_s)`` with ``iota_s = (-1)^q iota`` on ``C^q``."""
    if isinstance(a, FormCochain):
        a = TotalCochain.of(a)
    out = TotalCochain(a.n)
    for q, phi in a.parts.items():
        out = out + TotalCochain.of(phi)
        term = phi
        k = 0
        while True:
            p = term.form_degree
            if p is not None and p <= 0:
                break
            # stop once values have no forms left to contract
            nxt = iota_operator(term)
            k += 1
            s = sign * (-1 if (q + k - 1) & 1 else 1)
            term = nxt.scale(Fraction(s, k))
            out = out + TotalCochain.of(term)
            if p is None and k > phi.n:
                break
    return out


def _eps(p: int, q: int) -> int:
    return -1 if (p * q + p * (p + 1) // 2) & 1 else 1


def phi_value(a, T: tuple):
    """``Phi(a)`` evaluated on a sorted tuple; ``a`` may be a FormCochain or TotalCochain."""
    if isinstance(a, FormCochain):
        parts = {a.degree: a}
    else:
        parts = a.parts
    k = len(T)
    total = 0
    for q, phi in parts.items():
        p = k - q
        if p < 0:
            continue
        if p == 0:
            v = phi.on_sorted(T).at_zero()
        else:
            acc = 0
            for I, J, s in _shuffles(k, p):
                val = phi.on_sorted(tuple(T[j] for j in J)).component(p)
                if not val:
                    continue
                c = _contract_chain([T[i] for i in I], val).at_zero()
                if c:
                    acc = acc + (c if s > 0 else -c)
            v = acc
        if v:
            total = total + (v if _eps(p, q) > 0 else -v)
    return total


def phi_map(a, degree: int) -> FormCochain:
    """``Phi(a)`` in cochain degree ``degree`` as a constant-valued functional cochain."""
    n = a.n
    return FormCochain(n, degree, lambda T: FormalForm.constant(n, phi_value(a, T)), "Phi", 0)


def phi_on_slice(a, degree: int) -> TrivialCochain:
    """``Phi(a)`` materialised on the weight-zero basis (exact when ``a`` has weight zero)."""
    basis = weight_tuples(a.n, degree, 0)
    return TrivialCochain(a.n, degree, {T: phi_value(a, T) for T in basis})


def psi_homotopy(a) -> TotalCochain:
    """``Psi = -exp(iota_s) K_s exp(-iota_s)``."""
    e = exp_iota(a, -1)
    mid = TotalCochain(e.n)
    for q, phi in e.parts.items():
        s = -1 if q & 1 else 1
        fd = None if phi.form_degree is None else max(phi.form_degree - 1, 0)
        mid = mid + TotalCochain.of(phi.map_values(lambda v, s=s: radial_homotopy(v).scale(s), fd))
    return exp_iota(mid, 1).scale(-1)


# -- class expressions ------------------------------------------------------------

class ClassParseError(ValueError):
    pass


@dataclass(frozen=True)
class ClassExpression:
    """Product of generators, e.g. ``a1*t1^2``; a-factors appear at most once."""

    a_indices: tuple
    tau_exponents: tuple  # (index, exponent) sorted

    def bidegree(self) -> tuple[int, int]:
        p = sum(i * e for i, e in self.tau_exponents)
        q = sum(2 * i - 1 for i in self.a_indices) + p
        return (p, q)

    def chern_weight(self) -> int:
        return sum(i * e for i, e in self.tau_exponents)

    def __str__(self):
        parts = [f"a{i}" for i in self.a_indices]
        parts += [f"t{i}" + (f"^{e}" if e > 1 else "") for i, e in self.tau_exponents]
        return "*".join(parts) or "1"


_TOKEN = re.compile(r"^([at])(\d+)(?:\^(\d+))?$")


def parse_class(text: str) -> ClassExpression:
    s = "".join(text.split())
    if not s:
        raise ClassParseError("empty class expression")
    a_idx: list = []
    taus: dict = {}
    for tok in s.split("*"):
        m = _TOKEN.match(tok)
        if not m:
            raise ClassParseError(f"cannot parse factor {tok!r}")
        kind, idx, exp = m.group(1), int(m.group(2)), int(m.group(3) or 1)
        if idx < 1 or exp < 1:
            raise ClassParseError(f"bad index or exponent in {tok!r}")
        if kind == "a":
            if exp > 1 or idx in a_idx:
                raise ClassParseError(f"a{idx} is odd and squares to zero")
            a_idx.append(idx)
        else:
            taus[idx] = taus.get(idx, 0) + exp
    return ClassExpression(tuple(sorted(a_idx)), tuple(sorted(taus.items())))


def realize(expr: ClassExpression | str, n: int) -> FormCochain:
    """The product cochain in the order a-factors (ascending) then tau-factors."""
    if isinstance(expr, str):
        expr = parse_class(expr)
    for i in expr.a_indices + tuple(i for i, _ in expr.tau_exponents):
        _check_index(n, i)
    factors = [a_class(n, i).cochain for i in expr.a_indices]
    for i, e in expr.tau_exponents:
        factors += [tau_class(n, i).cochain] * e
    if not factors:
        return FormCochain(n, 0, lambda T: FormalForm.constant(n, 1), "1", 0)
    out = factors[0]
    for f in factors[1:]:
        out = cup_product(out, f)
    out.name = str(expr)
    return out


# -- comparisons --------------------------------------------------------------------

def _taylor_at_zero(m: MonomialField, k: int) -> int:
    """k-th derivative at 0 of the coefficient of a one-variable monomial field."""
    return factorial(k) if m.exponent[0] == k else 0


def wronskian_cocycle() -> TrivialCochain:
    """``(f, g, h) -> det [[f, g, h], [f', g', h'], [f'', g'', h'']](0)`` on vect(1)."""
    basis = weight_tuples(1, 3, 0)
    terms = {}
    for T in basis:
        rows = [[_taylor_at_zero(m, k) for m in T] for k in range(3)]
        terms[T] = Fraction(_det3(rows))
    return TrivialCochain(1, 3, terms)


def _det3(a) -> int:
    return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))


def scalar_ratio(x: TrivialCochain, y: TrivialCochain) -> Fraction | None:
    """c with ``x = c * y`` (None if not proportional or y = 0)."""
    if not y:
        return None
    key = next(iter(y.terms))
    c = Fraction(x.terms.get(key, 0)) / y.terms[key]
    keys = set(x.terms) | set(y.terms)
    for k in keys:
        if x.terms.get(k, 0) != c * y.terms.get(k, 0):
            return None
    return c


# -- ring presentation ----------------------------------------------------------------

@dataclass
class RingReport:
    n: int
    cocycles: dict = field(default_factory=dict)
    relations: dict = field(default_factory=dict)
    survivors: dict = field(default_factory=dict)
    independent: bool | None = None
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return (all(v["holds"] for v in self.cocycles.values())
                and all(v["exact"] for v in self.relations.values())
                and all(v["closed"] and not v["exact"] for v in self.survivors.values())
                and self.independent is not False)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "cocycles": self.cocycles,
            "relations": self.relations,
            "survivors": self.survivors,
            "independent": self.independent,
            "ok": self.ok,
            "notes": list(self.notes),
        }


def _chern_vectors(n: int, lo: int, hi: int):
    """Exponent tuples l with ``lo <= sum i l_i <= hi``."""
    out = []

    def rec(i, acc, w):
        if i > n:
            if lo <= w <= hi and any(acc):
                out.append(tuple(acc))
            return
        e = 0
        while w + i * e <= hi:
            rec(i + 1, acc + [e], w + i * e)
            e += 1

    rec(1, [], 0)
    return out


def _tau_expr(a_idx: tuple, ell: tuple) -> ClassExpression:
    return ClassExpression(a_idx, tuple((i + 1, e) for i, e in enumerate(ell) if e))


def class_exactness(alpha, n: int, degree: int, config: EngineConfig | None = None):
    """Exactness of ``Phi(alpha)`` in the weight-zero trivial complex.

    Returns ``(phi_alpha, witness)`` where witness is None for a nonzero class.
    """
    target = phi_on_slice(alpha, degree)
    if degree == 0:
        return target, (None if target else TrivialCochain(n, 0))
    sl = build_weight_zero_slice(n, degree - 1, config)
    return target, coboundary_witness(target, sl)


def verify_ring_presentation(n: int, max_n: int = 2, jet_bound: int | None = None,
                             margin: int = 1, config: EngineConfig | None = None) -> RingReport:
    """Check the generators, relations and surviving classes for ``n <= max_n``."""
    if n > max_n:
        from .ce_engine import ResourceLimitError
        raise ResourceLimitError(f"ring presentation for n={n} exceeds the cap {max_n}")
    report = RingReport(n)
    # generators are cocycles of d_CE with their own coefficients
    for i in range(1, n + 1):
        for gen in (a_class(n, i), tau_class(n, i)):
            # the scan runs to jb + margin + 1; order 2 already sees every
            # Jacobian entry that can feed a trace of this size
            jb = jet_bound if jet_bound is not None else min(gen.cochain.degree + 1, 2)
            ok, cert = is_cocycle(gen.cochain, total=False, jet_bound=jb, margin=margin)
            report.cocycles[str(gen)] = cert.to_dict()
    # relations: tau monomials above Chern weight n vanish as cochains
    for ell in _chern_vectors(n, n + 1, 2 * n):
        expr = _tau_expr((), ell)
        alpha = realize(expr, n)
        p, q = expr.bidegree()
        zero = p > n
        report.relations[str(expr)] = {
            "bidegree": [p, q],
            "exact": zero,
            "witness": "0" if zero else None,
            "reason": "form degree exceeds n, cochain vanishes identically" if zero else "",
        }
    # survivors: a1 * tau^l with Chern weight exactly n
    vecs = []
    slice_deg = None
    for ell in _chern_vectors(n, n, n):
        expr = _tau_expr((1,), ell)
        alpha = realize(expr, n)
        p, q = expr.bidegree()
        deg = p + q
        jb = jet_bound if jet_bound is not None else 1
        closed, cert = is_cocycle(alpha, total=True, jet_bound=jb, margin=margin)
        target, witness = class_exactness(alpha, n, deg, config)
        report.survivors[str(expr)] = {
            "bidegree": [p, q],
            "total_degree": deg,
            "closed": closed,
            "certificate": cert.to_dict(),
            "exact": witness is not None,
        }
        vecs.append(target)
        slice_deg = deg
    if len(vecs) > 1:
        sl = build_weight_zero_slice(n, slice_deg - 1, config)
        base = rank(sl.differential)
        cols = sl.differential
        for v in vecs:
            cols = cols.with_column(v.to_vector(sl.target_basis))
        report.independent = rank(cols) == base + len(vecs)
    elif vecs:
        report.independent = True
    return report
