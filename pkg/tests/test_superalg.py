from hypothesis import given, settings, strategies as st

from gfcoh.superalg import Poly, SuperAlgebra

# generators (parity, index)
A = SuperAlgebra(lambda g: g[0])
gens = [A.gen((p, i)) for p in (0, 1) for i in range(3)]


def test_signs():
    t1, t2, x = A.gen((1, 1)), A.gen((1, 2)), A.gen((0, 1))
    assert t1 * t2 == -(t2 * t1)
    assert not t1 * t1
    assert x * t1 == t1 * x
    assert x * x == x ** 2 and (x ** 2).terms == {(((0, 1), 2),): 1}


polys = st.lists(st.tuples(st.integers(-3, 3), st.lists(st.sampled_from(range(6)), max_size=3)), max_size=4).map(
    lambda terms: sum((Poly(A, {(): c}) * _prod(idx) for c, idx in terms), A.zero()))


def _prod(idx):
    out = A.const(1)
    for i in idx:
        out = out * gens[i]
    return out


@settings(max_examples=100, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@settings(max_examples=100, deadline=None)
@given(polys, polys)
def test_odd_derivation_leibniz(a, b):
    # d/d theta_0 from the left, odd
    D = lambda p: p.left_derivative((1, 0))
    pa = a.filter(lambda m: A.mono_parity(m) == 0)
    pb = b
    assert D(pa * pb) == D(pa) * pb + pa * D(pb)
    qa = a.filter(lambda m: A.mono_parity(m) == 1)
    assert D(qa * pb) == D(qa) * pb - qa * D(pb)


@settings(max_examples=100, deadline=None)
@given(polys)
def test_split_reconstructs(p):
    is_odd = lambda g: g[0] == 1
    back = A.zero()
    for mono, rest in p.split_left(is_odd).items():
        back = back + Poly(A, {mono: 1}) * rest
    assert back == p
    back = A.zero()
    for mono, rest in p.split_right(is_odd).items():
        back = back + rest * Poly(A, {mono: 1})
    assert back == p


def test_left_derivative_sign():
    t1, t2 = A.gen((1, 1)), A.gen((1, 2))
    assert (t1 * t2).left_derivative((1, 2)) == -t1
    assert (t1 * t2).left_derivative((1, 1)) == t2


def test_substitute():
    x, t = A.gen((0, 1)), A.gen((1, 1))
    p = x ** 2 * t
    q = p.substitute(lambda g: A.const(2) if g == (0, 1) else None)
    assert q == t * 4
