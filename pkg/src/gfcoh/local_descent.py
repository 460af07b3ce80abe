"""Descent for holomorphic vector fields on C^n, in a jet-coordinate model.

A field of the Dolbeault resolution is ``mu = sum_{i,J} alpha_i^J theta^J d_i``
where ``theta_l`` stands for the internal ``dzbar_l``.  Cochains on the jets
of such fields are super-commutative polynomials in jet coordinates

    u(i, J, a, b) = d_z^a d_zbar^b alpha_i^J at the base point,

of parity ``1 + |J|`` (ghost shift).  The descent form lives in the same
algebra with the odd de Rham generators ``dz_l`` and ``dzbar_l``.

Generator keys (tags order the monomials):

    (0, l)                dz_l         odd
    (1, l)                dzbar_l      odd
    (2, l)                theta_l      odd
    (3, i, J, a, b)       u            parity 1 + |J|
    (4, s, p)             eps_s        parity p (polarisation)
    (5, l), (6, l)        z_l, zbar_l  even
    (7,)                  t            odd (first-order variations)

The BRST differential is ``Q = Q_dbar + Q_CE``, the derivation whose value
on u(m, K, a, b) is ``D^a Dbar^b`` of the ``theta^K`` coefficient (u written to
the left of theta) of

    V_m = sum_l theta_l Dbar_l mu_m - sum_i mu_i D_i mu_m,

i.e. ``Q mu = dbar mu - (1/2) [mu, mu]``.  With these signs ``j^*`` is a
chain map from the trivial-coefficient complex of vect(n).  The descent
equations are written with ``d_T = -Q`` (the opposite overall sign of the
CE differential), so that ``Phi = exp(sum dzbar_l etabar_l + dz_l eta_l) phi0``
solves ``(del + dbar + d_T) Phi = 0`` with a plus sign in the exponent.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from math import factorial
from typing import Sequence

from .ce_engine import TrivialCochain
from .superalg import Poly, SuperAlgebra

__all__ = [
    "DescentModel",
    "DolbeaultField",
    "DescentSolution",
    "DescentCertificate",
    "model",
    "j_pullback",
    "eta_bar",
    "eta",
    "descent_solution",
    "verify_descent_polynomial",
    "verify_descent_inputs",
    "delta_integrand",
    "euler_operator",
    "is_total_divergence",
    "equivalent_mod_divergence",
    "jacobian_density",
    "reference_density",
    "NotTranslationInvariant",
    "evaluate_on_fields",
    "dolbeault_fields",
    "render",
    "reference_density_kind",
]

DZ, DZB, TH, U, EPS, Z, ZB, T = range(8)


def _parity(g) -> int:
    tag = g[0]
    if tag in (DZ, DZB, TH, T):
        return 1
    if tag == U:
        return 1 + len(g[2])
    if tag == EPS:
        return g[2]
    return 0


class NotTranslationInvariant(ValueError):
    pass


def _add(t: tuple, l: int) -> tuple:
    x = list(t)
    x[l] += 1
    return tuple(x)


class DescentModel:
    """Operators of the jet model for a fixed dimension n."""

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("n must be positive")
        self.n = n
        self.alg = SuperAlgebra(_parity)
        self.zero_idx = (0,) * n
        self._q_cache: dict = {}

    # generators ---------------------------------------------------------------
    def u(self, i: int, J: tuple = (), a: tuple | None = None, b: tuple | None = None) -> Poly:
        a = self.zero_idx if a is None else tuple(a)
        b = self.zero_idx if b is None else tuple(b)
        return self.alg.gen((U, i, tuple(J), a, b))

    def dz(self, l: int) -> Poly:
        return self.alg.gen((DZ, l))

    def dzb(self, l: int) -> Poly:
        return self.alg.gen((DZB, l))

    def theta(self, l: int) -> Poly:
        return self.alg.gen((TH, l))

    # total derivatives --------------------------------------------------------
    def D(self, l: int, p: Poly) -> Poly:
        alg = self.alg

        def img(g):
            if g[0] == U:
                return alg.gen((U, g[1], g[2], _add(g[3], l), g[4]))
            if g[0] == Z and g[1] == l:
                return alg.const(1)
            return None

        return p.derive(img, 0)

    def Dbar(self, l: int, p: Poly) -> Poly:
        alg = self.alg

        def img(g):
            if g[0] == U:
                return alg.gen((U, g[1], g[2], g[3], _add(g[4], l)))
            if g[0] == ZB and g[1] == l:
                return alg.const(1)
            return None

        return p.derive(img, 0)

    def D_multi(self, a: tuple, b: tuple, p: Poly) -> Poly:
        for l, e in enumerate(a):
            for _ in range(e):
                p = self.D(l, p)
        for l, e in enumerate(b):
            for _ in range(e):
                p = self.Dbar(l, p)
        return p

    def de_rham_holomorphic(self, p: Poly) -> Poly:
        """``del = sum_l dz_l D_l``."""
        acc = self.alg.zero()
        for l in range(self.n):
            acc = acc + self.dz(l) * self.D(l, p)
        return acc

    def de_rham_antiholomorphic(self, p: Poly) -> Poly:
        acc = self.alg.zero()
        for l in range(self.n):
            acc = acc + self.dzb(l) * self.Dbar(l, p)
        return acc

    # the generic field --------------------------------------------------------
    def _theta_monomial(self, J: tuple) -> Poly:
        out = self.alg.const(1)
        for l in J:
            out = out * self.theta(l)
        return out

    def field_component(self, m: int, a: tuple | None = None, b: tuple | None = None) -> Poly:
        """``mu_m`` (or a derivative) as ``sum_J u(m, J, a, b) theta^J``."""
        acc = self.alg.zero()
        for r in range(self.n + 1):
            for J in combinations(range(self.n), r):
                acc = acc + self.u(m, J, a, b) * self._theta_monomial(J)
        return acc

    def _theta_coefficients(self, p: Poly) -> dict:
        """``{K: coefficient}`` with p = sum_K coeff * theta^K."""
        out = {}
        for right, left in p.split_right(lambda g: g[0] == TH).items():
            K = tuple(g[1] for g, _ in right)
            out[K] = left
        return out

    @lru_cache(maxsize=None)
    def _v_components(self, m: int) -> tuple:
        """theta-coefficients of the linear and quadratic parts of V_m."""
        n = self.n
        lin = self.alg.zero()
        for l in range(n):
            lin = lin + self.theta(l) * self.field_component(m, None, _add(self.zero_idx, l))
        quad = self.alg.zero()
        for i in range(n):
            quad = quad - self.field_component(i) * self.field_component(m, _add(self.zero_idx, i), None)
        return (self._theta_coefficients(lin), self._theta_coefficients(quad))

    def q_image(self, g, part: str = "all") -> Poly | None:
        """Q on a generator; ``part`` is "dbar", "ce" or "all"."""
        if g[0] != U:
            return None
        key = (g, part)
        if key in self._q_cache:
            return self._q_cache[key]
        _, m, K, a, b = g
        lin, quad = self._v_components(m)
        acc = self.alg.zero()
        if part in ("dbar", "all"):
            acc = acc + lin.get(K, self.alg.zero())
        if part in ("ce", "all"):
            acc = acc + quad.get(K, self.alg.zero())
        acc = self.D_multi(a, b, acc)
        self._q_cache[key] = acc
        return acc

    def Q(self, p: Poly, part: str = "all") -> Poly:
        return p.derive(lambda g: self.q_image(g, part), 1)

    def d_T(self, p: Poly, part: str = "all") -> Poly:
        """The differential used in the descent equations, ``-Q``."""
        return -self.Q(p, part)

    # contractions -------------------------------------------------------------
    def eta_bar(self, l: int, p: Poly) -> Poly:
        """Dual of contracting theta_l out of the field: u(i,J) -> +-u(i, J + l)."""
        alg = self.alg

        def img(g):
            if g[0] != U or l in g[2]:
                return None
            J = tuple(sorted(g[2] + (l,)))
            # contraction passes the coefficient (parity |J|) and the theta's before l
            sign = -1 if (len(g[2]) + J.index(l)) & 1 else 1
            return alg.gen((U, g[1], J, g[3], g[4])) * sign

        return p.derive(img, 1)

    def eta(self, l: int, p: Poly) -> Poly:
        """Contraction with the constant field d/dz_l."""
        return p.left_derivative((U, l, (), self.zero_idx, self.zero_idx))


@lru_cache(maxsize=None)
def model(n: int) -> DescentModel:
    return DescentModel(n)


def _sign_count(mono: tuple, tag: int) -> int:
    return sum(1 for g, _ in mono if g[0] == tag)


# -- pullback and descent ------------------------------------------------------

def j_pullback(phi: TrivialCochain) -> Poly:
    """``e^(a, i) -> u(i, (), a, 0) / a!`` on the wedge basis."""
    M = model(phi.n)
    acc = M.alg.zero()
    for S, c in phi.terms.items():
        term = M.alg.const(c)
        for m in S:
            den = 1
            for e in m.exponent:
                den *= factorial(e)
            term = term * (M.u(m.direction, (), m.exponent) * Fraction(1, den))
        acc = acc + term
    return acc


def eta_bar(n: int, l: int, p: Poly) -> Poly:
    return model(n).eta_bar(l, p)


def eta(n: int, l: int, p: Poly) -> Poly:
    return model(n).eta(l, p)


# sign s in Phi = exp(s * sum(dzbar_l etabar_l + dz_l eta_l)) phi0; fixed by
# [d_T, eta_l] = D_l and [d_T, etabar_l] = Dbar_l
DESCENT_SIGN = 1


def _apply_N(M: DescentModel, p: Poly) -> Poly:
    acc = M.alg.zero()
    for l in range(M.n):
        acc = acc + M.dzb(l) * M.eta_bar(l, p) + M.dz(l) * M.eta(l, p)
    return acc


def bidegree(mono: tuple) -> tuple[int, int]:
    return (_sign_count(mono, DZ), _sign_count(mono, DZB))


@dataclass
class DescentSolution:
    n: int
    degree: int
    phi0: Poly
    total: Poly
    components: dict = field(default_factory=dict)

    def component(self, i: int, j: int) -> Poly:
        return self.components.get((i, j), model(self.n).alg.zero())

    def body(self, i: int, j: int) -> Poly:
        """The coefficient of the standard (i, j) form basis elements, keyed by index sets."""
        return self.component(i, j)


def descent_solution(phi: TrivialCochain, check_closed: bool = True) -> DescentSolution:
    M = model(phi.n)
    if check_closed and phi.differential():
        raise ValueError("descent needs a closed cochain")
    phi0 = j_pullback(phi)
    total = phi0
    term = phi0
    k = 1
    while term:
        term = _apply_N(M, term) * Fraction(DESCENT_SIGN, k)
        total = total + term
        k += 1
    comps: dict = {}
    for mono, c in total.terms.items():
        bd = bidegree(mono)
        comps.setdefault(bd, {})[mono] = c
    components = {bd: Poly(M.alg, t) for bd, t in comps.items()}
    return DescentSolution(phi.n, phi.degree, phi0, total, components)


def _b_order(mono: tuple) -> int:
    return sum(sum(g[4]) for g, _ in mono if g[0] == U)


@dataclass
class DescentCertificate:
    holds: bool
    checks: dict
    jet_bound: int | None = None
    margin: int | None = None
    inputs_checked: int = 0
    stabilized: bool = True

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "checks": self.checks,
            "jet_bound": self.jet_bound,
            "margin": self.margin,
            "inputs_checked": self.inputs_checked,
            "stabilized": self.stabilized,
        }


def _equations(M: DescentModel, sol: DescentSolution) -> dict:
    """Residuals of the holomorphic and Cartan descent equations per (i, j)."""
    out = {}
    n = M.n
    for i in range(n + 1):
        for j in range(n + 1):
            # holomorphic: dbar phi^{i,j-1} + Q_dbar phi^{i,j}
            hol = M.d_T(sol.component(i, j), "dbar")
            if j > 0:
                hol = hol + M.de_rham_antiholomorphic(sol.component(i, j - 1))
            car = M.d_T(sol.component(i, j), "ce")
            if i > 0:
                car = car + M.de_rham_holomorphic(sol.component(i - 1, j))
            out[(i, j)] = (hol, car)
    return out


def verify_descent_polynomial(sol: DescentSolution) -> DescentCertificate:
    """Both descent equations as identities of jet polynomials."""
    M = model(sol.n)
    checks = {}
    ok = True
    for (i, j), (hol, car) in _equations(M, sol).items():
        checks[f"hol({i},{j})"] = not hol
        checks[f"cartan({i},{j})"] = not car
        ok = ok and not hol and not car
    full = M.d_T(sol.total) + M.de_rham_holomorphic(sol.total) + M.de_rham_antiholomorphic(sol.total)
    checks["total"] = not full
    return DescentCertificate(ok and not full, checks)


# -- evaluation on concrete Dolbeault fields -----------------------------------------

@dataclass(frozen=True)
class DolbeaultField:
    """``coeff * z^p zbar^q theta^J d_i``."""

    direction: int
    p: tuple
    q: tuple
    J: tuple = ()
    coeff: Fraction = Fraction(1)

    @property
    def degree(self) -> int:
        return sum(self.p) + sum(self.q)

    @property
    def ghost(self) -> int:
        return len(self.J)

    def __str__(self):
        return f"z^{self.p} zb^{self.q} th{self.J} d{self.direction + 1}"


def dolbeault_fields(n: int, max_degree: int) -> list:
    out = []
    for d in range(max_degree + 1):
        for pq in _exponents(2 * n, d):
            p, q = pq[:n], pq[n:]
            for r in range(n + 1):
                for J in combinations(range(n), r):
                    for i in range(n):
                        out.append(DolbeaultField(i, p, q, J))
    return out


def _exponents(k: int, d: int):
    if k == 1:
        yield (d,)
        return
    for first in range(d + 1):
        for rest in _exponents(k - 1, d - first):
            yield (first,) + rest


def _field_poly(M: DescentModel, f: DolbeaultField, eps: Poly) -> Poly:
    """``eps * coeff * z^p zbar^q theta^J`` as a polynomial (the d_i slot is implicit)."""
    alg = M.alg
    mono = []
    for l, e in enumerate(f.p):
        if e:
            mono.append(((Z, l), e))
    for l, e in enumerate(f.q):
        if e:
            mono.append(((ZB, l), e))
    base = Poly(alg, {tuple(sorted(mono)): f.coeff})
    return eps * base * M._theta_monomial(f.J)


def _concrete_mu(M: DescentModel, fields: Sequence[DolbeaultField]):
    """Polarised field: list over directions of sum_s eps_s xi_s, and the eps generators."""
    comps = [M.alg.zero() for _ in range(M.n)]
    eps_list = []
    for s, f in enumerate(fields):
        e = M.alg.gen((EPS, s, (1 + f.ghost) & 1))
        eps_list.append(e)
        comps[f.direction] = comps[f.direction] + _field_poly(M, f, e)
    return comps, eps_list


def _partial(M: DescentModel, p: Poly, l: int, anti: bool) -> Poly:
    """Partial derivative in z_l (or zbar_l); these generators are even."""
    target = (ZB if anti else Z, l)
    acc: dict = {}
    for mono, c in p.terms.items():
        for pos, (g, e) in enumerate(mono):
            if g == target:
                new = mono[:pos] + (((g, e - 1),) if e > 1 else ()) + mono[pos + 1:]
                acc[new] = acc.get(new, 0) + c * e
                break
    return Poly(M.alg, acc)


def _jets(M: DescentModel, comps: Sequence[Poly]):
    """Substitution rule u(i,J,a,b) -> d^a dbar^b of the theta^J coefficient of comps[i]."""
    coeffs = [M._theta_coefficients(c) for c in comps]
    cache: dict = {}

    def img(g):
        if g[0] != U:
            return None
        v = cache.get(g)
        if v is None:
            _, i, J, a, b = g
            v = coeffs[i].get(J, M.alg.zero())
            for l, e in enumerate(a):
                for _ in range(e):
                    v = _partial(M, v, l, False)
            for l, e in enumerate(b):
                for _ in range(e):
                    v = _partial(M, v, l, True)
            cache[g] = v
        return v

    return img


def _mc_variation(M: DescentModel, comps: Sequence[Poly], part: str) -> list:
    """``dbar mu`` and/or ``-(1/2)[mu, mu]`` computed on the concrete polynomial field."""
    n = M.n
    out = [M.alg.zero() for _ in range(n)]
    for m in range(n):
        if part in ("dbar", "all"):
            for l in range(n):
                out[m] = out[m] + M.theta(l) * _partial(M, comps[m], l, True)
        if part in ("ce", "all"):
            for i in range(n):
                out[m] = out[m] - comps[i] * _partial(M, comps[m], i, False)
    return out


def _evaluate(M: DescentModel, F: Poly, comps: Sequence[Poly]) -> Poly:
    return F.substitute(_jets(M, comps))


def _multilinear_part(p: Poly, eps_list: Sequence[Poly]) -> Poly:
    """Coefficient of eps_0 ... eps_{k-1} (each exactly once), eps written on the left."""
    want = tuple(sorted(next(iter(e.terms))[0][0] for e in eps_list))
    out = p.alg.zero()
    for left, right in p.split_left(lambda g: g[0] == EPS).items():
        if tuple(g for g, _ in left) == want and all(e == 1 for _, e in left):
            out = out + right
    return out


def _apply_Q_on_inputs(M: DescentModel, F: Poly, comps, part: str) -> Poly:
    """``(Q F)(mu)`` via the t-linear term of ``F(mu + t V(mu))``."""
    V = _mc_variation(M, comps, part)
    t = M.alg.gen((T,))
    shifted = [c + t * v for c, v in zip(comps, V)]
    val = _evaluate(M, F, shifted)
    out = M.alg.zero()
    for left, right in val.split_left(lambda g: g[0] == T).items():
        if left == (((T,), 1),):
            out = out + right
    return out


def _holo_derivative(M: DescentModel, p: Poly) -> Poly:
    acc = M.alg.zero()
    for l in range(M.n):
        acc = acc + M.dz(l) * _partial(M, p, l, False)
    return acc


def _anti_derivative(M: DescentModel, p: Poly) -> Poly:
    acc = M.alg.zero()
    for l in range(M.n):
        acc = acc + M.dzb(l) * _partial(M, p, l, True)
    return acc


def _arity(p: Poly) -> set:
    return {sum(e for g, e in mono if g[0] == U) for mono in p.terms}


def _ghost_counts(p: Poly) -> set:
    return {sum(len(g[2]) * e for g, e in mono if g[0] == U) for mono in p.terms}


def verify_descent_inputs(sol: DescentSolution, jet_bound: int | None = None, margin: int = 1,
                          max_inputs: int | None = None) -> DescentCertificate:
    """Check the descent equations by evaluation on monomial Dolbeault fields.

    Every equation is evaluated on all multisets of monomial fields of
    polynomial degree at most ``jet_bound + margin + 1``, and the verdict
    restricted to degree ``jet_bound + margin`` must agree with it.  ``d_T``
    is applied through the concrete Maurer-Cartan variation of the fields,
    not through the jet-coordinate formula.  Tuples whose total ghost number
    differs from every term of an equation evaluate to zero and are skipped.
    """
    M = model(sol.n)
    if jet_bound is None:
        jet_bound = max((sum(g[3]) for mono in sol.phi0.terms for g, _ in mono if g[0] == U),
                        default=0) + 1
    low = jet_bound + margin
    fields = dolbeault_fields(sol.n, low + 1)
    checks = {}
    count = 0
    fail_low = fail_high = False
    k = sol.degree
    for i in range(sol.n + 1):
        for j in range(sol.n + 1):
            comp = sol.component(i, j)
            prev_j = sol.component(i, j - 1) if j > 0 else M.alg.zero()
            prev_i = sol.component(i - 1, j) if i > 0 else M.alg.zero()
            eqs = (
                ("hol", k - i, prev_j, "dbar", {c - 1 for c in _ghost_counts(comp)} | _ghost_counts(prev_j)),
                ("cartan", k - i + 1, prev_i, "ce", _ghost_counts(comp) | _ghost_counts(prev_i)),
            )
            for name, ar, prev, part, ghosts in eqs:
                ok = True
                if ar > 0 and (comp or prev):
                    for fs in _input_tuples(fields, ar, max_inputs):
                        if sum(f.ghost for f in fs) not in ghosts:
                            continue
                        count += 1
                        comps, eps = _concrete_mu(M, fs)
                        if name == "hol":
                            r = _anti_derivative(M, _evaluate(M, prev, comps))
                        else:
                            r = _holo_derivative(M, _evaluate(M, prev, comps))
                        r = _multilinear_part(r - _apply_Q_on_inputs(M, comp, comps, part), eps)
                        if r:
                            ok = False
                            fail_high = True
                            if max(f.degree for f in fs) <= low:
                                fail_low = True
                                break
                checks[f"{name}({i},{j})"] = ok
    holds = all(checks.values())
    return DescentCertificate(holds, checks, jet_bound, margin, count, fail_low == fail_high)


def _input_tuples(fields, k: int, max_inputs: int | None):
    it = combinations_with_replacement(fields, k)
    for idx, fs in enumerate(it):
        if max_inputs is not None and idx >= max_inputs:
            return
        # odd inputs cannot repeat in a nonzero multilinear evaluation
        if any(fs[r] == fs[r + 1] and (1 + fs[r].ghost) & 1 for r in range(k - 1)):
            continue
        yield fs


# -- local functionals -------------------------------------------------------------

def delta_integrand(sol: DescentSolution) -> Poly:
    """Coefficient of ``dz_1..dz_n dzbar_1..dzbar_n`` in the top component."""
    M = model(sol.n)
    n = sol.n
    top = sol.component(n, n)
    want = tuple(((DZ, l), 1) for l in range(n)) + tuple(((DZB, l), 1) for l in range(n))
    parts = top.split_left(lambda g: g[0] in (DZ, DZB))
    return parts.get(want, M.alg.zero())


def _check_invariant(p: Poly):
    for mono in p.terms:
        for g, _ in mono:
            if g[0] in (Z, ZB):
                raise NotTranslationInvariant("density depends explicitly on the base point")
            if g[0] not in (U,):
                raise NotTranslationInvariant(f"unexpected generator {g} in a density")


def euler_operator(n: int, density: Poly) -> dict:
    """``E_v F = sum_{a,b} (-1)^{|a|+|b|} D^a Dbar^b dF/du(v, a, b)`` for each field slot v."""
    _check_invariant(density)
    M = model(n)
    gens = density.generators()
    slots = sorted({(g[1], g[2]) for g in gens})
    out = {}
    for v in slots:
        acc = M.alg.zero()
        for g in gens:
            if (g[1], g[2]) != v:
                continue
            dF = density.left_derivative(g)
            sgn = -1 if (sum(g[3]) + sum(g[4])) & 1 else 1
            acc = acc + M.D_multi(g[3], g[4], dF) * sgn
        out[v] = acc
    return out


def is_total_divergence(n: int, density: Poly) -> bool:
    """True iff every variational derivative vanishes (and no constant term survives)."""
    _check_invariant(density)
    if density.terms.get((), 0):
        return False
    return all(not e for e in euler_operator(n, density).values())


def equivalent_mod_divergence(n: int, a: Poly, b: Poly) -> Fraction | None:
    """Scalar c with ``a - c b`` a total divergence, or None."""
    Eb = euler_operator(n, b)
    Ea = euler_operator(n, a)
    if all(not e for e in Eb.values()):
        return Fraction(0) if all(not e for e in Ea.values()) else None
    c = None
    for v, eb in Eb.items():
        if not eb:
            continue
        ea = Ea.get(v, model(n).alg.zero())
        mono, cb = next(iter(eb.terms.items()))
        c = Fraction(ea.terms.get(mono, 0)) / cb
        break
    diff = a - b * c
    return c if is_total_divergence(n, diff) else None


def _theta_to_dzbar(M: DescentModel, p: Poly) -> Poly:
    alg = M.alg
    return p.substitute(lambda g: alg.gen((DZB, g[1])) if g[0] == TH else None)


def _top_coefficient(M: DescentModel, p: Poly) -> Poly:
    n = M.n
    want = tuple(((DZ, l), 1) for l in range(n)) + tuple(((DZB, l), 1) for l in range(n))
    return p.split_left(lambda g: g[0] in (DZ, DZB)).get(want, M.alg.zero())


def jacobian_matrix(M: DescentModel) -> list:
    """``(J mu)_ij = D_j mu_i`` with theta-valued entries."""
    n = M.n
    return [[M.field_component(i, _add(M.zero_idx, j)) for j in range(n)] for i in range(n)]


def _mat_mul(A, B, alg):
    n = len(A)
    return [[sum((A[i][k] * B[k][j] for k in range(n)), alg.zero()) for j in range(n)] for i in range(n)]


def _trace(A, alg):
    return sum((A[i][i] for i in range(len(A))), alg.zero())


def _del_matrix(M: DescentModel, A):
    return [[M.de_rham_holomorphic(x) for x in row] for row in A]


def jacobian_density(n: int = 1) -> Poly:
    """Top coefficient of ``J(mu) del J(mu)`` (n = 1), theta read as dzbar."""
    if n != 1:
        raise ValueError("J(mu) del J(mu) is the one-dimensional density")
    M = model(1)
    J = jacobian_matrix(M)[0][0]
    return _top_coefficient(M, _theta_to_dzbar(M, J * M.de_rham_holomorphic(J)))


def reference_density(n: int, kind: str) -> Poly:
    """Densities built from traces of ``J mu`` and ``del J mu``.

    ``kind``: "J dJ" (n=1), "TrJ Tr(dJ dJ)", "TrJ TrdJ TrdJ" (n=2),
    "Tr(J dJ) Tr(dJ dJ)" (n=3).
    """
    M = model(n)
    alg = M.alg
    J = jacobian_matrix(M)
    dJ = _del_matrix(M, J)
    if kind == "J dJ":
        return jacobian_density(n)
    if kind == "TrJ Tr(dJ dJ)":
        expr = _trace(J, alg) * _trace(_mat_mul(dJ, dJ, alg), alg)
    elif kind == "TrJ TrdJ TrdJ":
        t = _trace(dJ, alg)
        expr = _trace(J, alg) * t * t
    elif kind == "Tr(J dJ) Tr(dJ dJ)":
        expr = _trace(_mat_mul(J, dJ, alg), alg) * _trace(_mat_mul(dJ, dJ, alg), alg)
    else:
        raise ValueError(f"unknown density {kind!r}")
    return _top_coefficient(M, _theta_to_dzbar(M, expr))


def density_coboundary(n: int, density: Poly, part: str = "ce") -> Poly:
    """``d_T`` (or one of its parts) applied to a density."""
    return model(n).d_T(density, part)


def evaluate_on_fields(F: Poly, fields: Sequence[DolbeaultField], n: int | None = None) -> Poly:
    """Multilinear value of a jet cochain on concrete fields, at a symbolic point.

    Each field enters through a polarisation parameter of parity
    ``1 + ghost``; the result is the coefficient of ``eps_0 ... eps_{k-1}``
    (in that order) and is a polynomial in z, zbar and the form generators.
    """
    n = n if n is not None else (len(fields[0].p) if fields else 1)
    M = model(n)
    comps, eps = _concrete_mu(M, fields)
    return _multilinear_part(_evaluate(M, F, comps), eps)


def _gen_name(g) -> str:
    tag = g[0]
    if tag == U:
        _, i, J, a, b = g
        s = f"u{i + 1}"
        if J:
            s += "[" + ",".join(str(l + 1) for l in J) + "]"
        if any(a):
            s += "_z" + "".join(str(l + 1) * e for l, e in enumerate(a))
        if any(b):
            s += "_zb" + "".join(str(l + 1) * e for l, e in enumerate(b))
        return s
    names = {DZ: "dz", DZB: "dzb", TH: "th", Z: "z", ZB: "zb"}
    if tag in names:
        return f"{names[tag]}{g[1] + 1}"
    return str(g)


def render(p: Poly) -> str:
    """Deterministic text form; ``u2[1]_z11`` is d_z1^2 of the dzbar_1 part of mu_2."""
    if not p:
        return "0"
    parts = []
    for mono, c in sorted(p.terms.items()):
        body = "*".join(_gen_name(g) + (f"^{e}" if e > 1 else "") for g, e in mono)
        c = Fraction(c)
        parts.append(f"{c}" if not body else (body if c == 1 else f"-{body}" if c == -1 else f"{c}*{body}"))
    return " + ".join(parts).replace("+ -", "- ")


def reference_density_kind(expr, n: int) -> str | None:
    """Closed-form density expected for a class expression, if one is tabulated."""
    key = (n, str(expr))
    return {
        (1, "a1*t1"): "J dJ",
        (2, "a1*t2"): "TrJ Tr(dJ dJ)",
        (2, "a1*t1^2"): "TrJ TrdJ TrdJ",
        (3, "a2*t2"): "Tr(J dJ) Tr(dJ dJ)",
    }.get(key)
