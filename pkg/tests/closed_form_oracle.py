"""Independent closed-form values of the n=1 Wronskian descent components.

Fields are concrete polynomials ``a(z, zbar) d_z``; ghost-1 fields carry one
internal ``dzbar``.  The reference values are Wronskian-type determinants
computed directly from z-derivatives of the coefficient polynomials.
"""
from fractions import Fraction
from itertools import product

from gfcoh.local_descent import DZ, DZB, DolbeaultField, _partial, evaluate_on_fields, model

MONOS = [(k, l) for k in range(4) for l in range(2)]


def field(p, q=0, ghost=0):
    return DolbeaultField(0, (p,), (q,), (0,) if ghost else ())


def coefficient(M, p, q=0):
    return M.alg.gen((5, 0)) ** p * M.alg.gen((6, 0)) ** q


def dz(M, p, k=1):
    for _ in range(k):
        p = _partial(M, p, 0, False)
    return p


def form_part(M, p, want):
    return p.split_left(lambda g: g[0] in (DZ, DZB)).get(want, M.alg.zero())


def ratio(val, ref):
    if not ref:
        return None if val else "zero"
    mono, c = next(iter(ref.terms.items()))
    r = Fraction(val.terms.get(mono, 0)) / c
    return r if val == ref * r else None


def wronskian(M, cols):
    r = [[dz(M, x, k) for x in cols] for k in range(3)]
    return (r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]))


def closed_form_ratios(sol) -> dict:
    """Scalars relating phi^0, psi^{0,1}, psi^{1,1} to their closed forms."""
    M = model(1)
    out = {"0,0": set(), "0,1": set(), "1,1": set()}
    for ms in product(MONOS, repeat=3):
        fs = [field(k, l) for k, l in ms]
        cols = [coefficient(M, k, l) for k, l in ms]
        W = wronskian(M, cols)
        out["0,0"].add(ratio(evaluate_on_fields(sol.component(0, 0), fs), W))
        fs1 = [field(*ms[0], ghost=1)] + fs[1:]
        val = form_part(M, evaluate_on_fields(sol.component(0, 1), fs1), (((DZB, 0), 1),))
        out["0,1"].add(ratio(val, W))
    for ms in product(MONOS, repeat=2):
        fs = [field(*ms[0], ghost=1), field(*ms[1])]
        a, b = coefficient(M, *ms[0]), coefficient(M, *ms[1])
        ref = dz(M, a) * dz(M, b, 2) - dz(M, a, 2) * dz(M, b)
        val = form_part(M, evaluate_on_fields(sol.component(1, 1), fs), (((DZ, 0), 1), ((DZB, 0), 1)))
        out["1,1"].add(ratio(val, ref))
    for v in out.values():
        v.discard("zero")
    return out
