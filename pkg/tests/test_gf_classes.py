import random
from fractions import Fraction
from itertools import permutations

import pytest

from gfcoh.ce_engine import (
    FormCochain,
    TotalCochain,
    build_weight_zero_slice,
    generic_cochain,
    include_trivial,
    is_cocycle,
    total_differential,
    tuples_up_to,
    weight_tuples,
    TrivialCochain,
)
from gfcoh.formal_calculus import (
    FormalForm,
    FormalVectorField,
    MonomialField,
    contract,
    field_basis,
    gl_embedding,
    jacobian,
    matrix_product,
    trace,
)
from gfcoh.gf_classes import (
    ClassParseError,
    a_class,
    cup_product,
    iota_operator,
    iota_power,
    parse_class,
    phi_map,
    phi_on_slice,
    psi_homotopy,
    realize,
    scalar_ratio,
    tau_class,
    verify_ring_presentation,
    wronskian_cocycle,
)
from gfcoh.gf_classes import _perm_sign

M = MonomialField.of


def V(m):
    return FormalVectorField(m.n, {m: 1})


def test_a1_examples():
    a1 = a_class(1, 1).cochain
    assert a1(M((1,), 0)) == FormalForm.constant(1, 1)
    assert not a1(M((0,), 0))
    assert a1(M((3,), 0)) == FormalForm.monomial((2,), (), 3)


def test_a2_is_cocycle():
    gen = a_class(2, 2)
    assert gen.cochain.degree == 3 and gen.bidegree == (0, 3)
    ok, cert = is_cocycle(gen.cochain, jet_bound=2, margin=1)
    assert ok and cert.stabilized


def test_tau1_examples():
    t1 = tau_class(1, 1).cochain
    assert t1(M((2,), 0)) == FormalForm.monomial((0,), (0,), 2)
    it = iota_operator(t1)
    for a in range(5):
        for b in range(5):
            f, g = FormalForm.monomial((a,)), FormalForm.monomial((b,))
            expected = f * g.partial(0).partial(0) - g * f.partial(0).partial(0)
            assert it(M((a,), 0), M((b,), 0)) == expected


def test_tau2_on_linear_fields_and_antisymmetry():
    t2 = tau_class(2, 2).cochain
    A, B = gl_embedding([[1, 2], [0, 1]]), gl_embedding([[0, 1], [3, 0]])
    # dJ of a linear field vanishes
    for X in A.terms:
        for Y in B.terms:
            assert not t2(X, Y)
    rng = random.Random(2)
    basis = field_basis(2, 3)
    for _ in range(100):
        X, Y = rng.sample(basis, 2)
        assert t2(X, Y) == -t2(Y, X)


def test_index_range():
    with pytest.raises(ValueError):
        a_class(1, 2)
    with pytest.raises(ValueError):
        tau_class(2, 0)


def test_cup_product_lowest_arity():
    rng = random.Random(4)
    phi, psi = a_class(2, 1).cochain, tau_class(2, 1).cochain
    prod = cup_product(phi, psi)
    for _ in range(50):
        X, Y = rng.sample(field_basis(2, 3), 2)
        assert prod(X, Y) == phi(X).wedge(psi(Y)) - phi(Y).wedge(psi(X))


def test_a1_tau1_bidegree():
    expr = parse_class("a1*t1")
    assert expr.bidegree() == (1, 2)
    c = realize(expr, 1)
    assert c.degree == 2 and c.form_degree == 1


def test_iota_rejects_functions():
    with pytest.raises(ValueError):
        iota_operator(a_class(1, 1).cochain)


def test_half_iota_squared_six_terms():
    t2 = tau_class(2, 2).cochain
    half = iota_power(t2, 2)
    twice = iota_operator(iota_operator(t2))
    rng = random.Random(1)
    basis = field_basis(2, 3)
    for _ in range(60):
        X = rng.sample(basis, 4)
        assert half(*X) == twice(*X).scale(Fraction(1, 2))
        expected = FormalForm.zero(2)
        for i in range(4):
            for j in range(i + 1, 4):
                k, l = [r for r in range(4) if r not in (i, j)]
                s = _perm_sign((i, j, k, l))
                expected = expected + contract(V(X[i]), contract(V(X[j]), t2(X[k], X[l]))).scale(s)
        assert half(*X) == expected


def test_phi_of_inclusion_is_identity():
    rng = random.Random(3)
    for n, k in ((1, 3), (2, 3), (2, 4)):
        sl = build_weight_zero_slice(n, k)
        phi = sl.cochain([rng.randint(-3, 3) for _ in sl.basis])
        assert phi_on_slice(include_trivial(phi), k) == phi


def test_phi_a1_tau1_is_wronskian():
    assert scalar_ratio(phi_on_slice(realize("a1*t1", 1), 3), wronskian_cocycle()) == -1


def test_phi_a1_tau2_matches_closed_form():
    def closed_form(X):
        J0 = jacobian(V(X[0])).at_zero()
        tr = J0[0][0] + J0[1][1]
        if not tr:
            return 0
        w = trace(matrix_product(jacobian(V(X[3])).differential(), jacobian(V(X[4])).differential()))
        return tr * contract(V(X[1]), contract(V(X[2]), w)).at_zero()

    terms = {}
    for T in weight_tuples(2, 5, 0):
        s = sum(_perm_sign(p) * closed_form([T[i] for i in p]) for p in permutations(range(5)))
        if s:
            terms[T] = Fraction(s)
    ratio = scalar_ratio(phi_on_slice(realize("a1*t2", 2), 5), TrivialCochain(2, 5, terms))
    assert ratio == Fraction(-1, 2)


@pytest.mark.parametrize("n,k", [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3)])
def test_phi_chain_map_small(n, k):
    for p in range(0, min(n, k) + 1):
        G = generic_cochain(n, k - p, p)
        assert phi_on_slice(total_differential(G), k + 1) == phi_on_slice(G, k).differential()


def test_phi_multiplicative_on_generators():
    pairs = [(a_class(2, 1).cochain, tau_class(2, 1).cochain),
             (tau_class(2, 1).cochain, tau_class(2, 1).cochain),
             (a_class(2, 1).cochain, tau_class(2, 2).cochain),
             (a_class(1, 1).cochain, tau_class(1, 1).cochain)]
    for A, B in pairs:
        k = A.degree + A.form_degree + B.degree + B.form_degree
        pa = phi_map(A, A.degree + A.form_degree)
        pb = phi_map(B, B.degree + B.form_degree)
        assert phi_on_slice(cup_product(A, B), k) == phi_on_slice(cup_product(pa, pb), k)


def test_leibniz_rule():
    # D(ab) = Da b + (-1)^(p+q) a Db, on generic low-degree cochains
    A, B = generic_cochain(2, 1, 1, max_weight=2), a_class(2, 1).cochain
    L = total_differential(cup_product(A, B))
    DA = total_differential(A)
    s = -1 if (A.degree + A.form_degree) & 1 else 1
    R = TotalCochain(2)
    for q, part in DA.parts.items():
        R = R + TotalCochain.of(cup_product(part, B))
    for q, part in total_differential(B).parts.items():
        R = R + TotalCochain.of(cup_product(A, part).scale(s))
    for k in L.parts:
        for T in tuples_up_to(2, k, 2):
            assert L.evaluate(T) == R.evaluate(T)


def test_psi_examples():
    a1 = a_class(1, 1).cochain
    P = psi_homotopy(TotalCochain.of(a1))
    assert all(not P.evaluate(T) for q in P.parts for T in tuples_up_to(1, q, 4))
    # the constant 0-cochain dx has radial primitive x; our sign convention gives -x
    dx = FormCochain(1, 0, lambda T: FormalForm.dx(1, 0), "dx", 1)
    psi = psi_homotopy(TotalCochain.of(dx))
    assert psi.evaluate(()) == FormalForm.monomial((1,), (), -1)


def _homotopy_defect(A, n, bound):
    k = max(A.parts) + max(p.form_degree for p in A.parts.values())
    lhs = TotalCochain.of(phi_map(A, k)) - A
    rhs = total_differential(psi_homotopy(A)) + psi_homotopy(total_differential(A))
    bad = 0
    for d in set(lhs.parts) | set(rhs.parts):
        for T in tuples_up_to(n, d, bound):
            if lhs.evaluate(T) != rhs.evaluate(T):
                bad += 1
    return bad


def test_homotopy_identity_on_tau1():
    assert _homotopy_defect(TotalCochain.of(tau_class(1, 1).cochain), 1, 5) == 0


@pytest.mark.parametrize("q,p", [(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 1)])
def test_homotopy_identity_generic_small(q, p):
    assert _homotopy_defect(TotalCochain.of(generic_cochain(1, q, p)), 1, 4) == 0


def test_parse_class():
    e = parse_class(" a1 * t1 ^ 2 ")
    assert str(e) == "a1*t1^2" and e.bidegree() == (2, 3)
    assert str(parse_class("t1*a1")) == "a1*t1"
    for bad in ("bogus", "a1*a1", "t0", "", "a1^2", "t1^"):
        with pytest.raises(ClassParseError):
            parse_class(bad)


def test_ring_presentation_n1():
    r = verify_ring_presentation(1)
    assert r.ok
    assert r.relations["t1^2"]["exact"]
    assert r.survivors["a1*t1"]["closed"] and not r.survivors["a1*t1"]["exact"]
