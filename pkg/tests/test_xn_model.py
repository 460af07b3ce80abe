from hypothesis import given, settings, strategies as st

from gfcoh.ce_engine import betti
from gfcoh.xn_model import CdgaElement, model_basis, model_betti, model_differential

xi, c = CdgaElement.xi, CdgaElement.c


def test_differential_examples():
    assert model_differential(xi(1, 1)) == c(1, 1)
    assert not model_differential(xi(1, 1) * c(1, 1))
    assert model_differential(xi(2, 1) * xi(2, 2)) == c(2, 1) * xi(2, 2) - xi(2, 1) * c(2, 2)


def test_relations_kill_high_chern_weight():
    assert not c(1, 1) * c(1, 1)
    assert not c(2, 1) * c(2, 2)
    assert c(2, 1) * c(2, 1)


def test_d_squared_on_basis():
    for n in (1, 2, 3):
        for key in model_basis(n):
            e = CdgaElement(n, {key: 1})
            assert not model_differential(model_differential(e))


def test_basis_count():
    # 2^n times the number of Chern vectors of weight <= n (1, 2, 4 for n = 1, 2, 3)
    assert [len(model_basis(n)) for n in (1, 2, 3)] == [2 * 2, 4 * 4, 8 * 7]


def test_betti_examples():
    assert model_betti(1).as_list(range(4)) == [1, 0, 0, 1]
    b2 = model_betti(2)
    assert b2[5] == 2 and b2[0] == 1
    assert model_betti(3)[7] == 4


def test_agrees_with_engine():
    eng = betti(1, 4)
    mod = model_betti(1, 4)
    assert [mod[q] for q in range(1, 5)] == eng.as_list(range(1, 5)) and mod[0] == 1
    assert model_betti(2, 6)[5] == betti(2, 5)[5]


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_leibniz(data):
    n = 2
    basis = model_basis(n)
    a = CdgaElement(n, {data.draw(st.sampled_from(basis)): data.draw(st.integers(-3, 3))})
    b = CdgaElement(n, {data.draw(st.sampled_from(basis)): data.draw(st.integers(-3, 3))})
    (key,) = a.terms or [((), (0, 0))]
    sign = -1 if sum(2 * i - 1 for i in key[0]) & 1 else 1
    assert model_differential(a * b) == model_differential(a) * b + sign * (a * model_differential(b))
