import random

import pytest
from hypothesis import given, settings, strategies as st

from gfcoh.ce_engine import (
    EngineConfig,
    FormCochain,
    ResourceLimitError,
    TrivialCochain,
    betti,
    build_slice,
    build_weight_zero_slice,
    ce_differential,
    coboundary_witness,
    euler_homotopy_matrix,
    gl_complex_betti,
    include_trivial,
    is_cocycle,
    weight_tuples,
)
from gfcoh.exact_linalg import SparseMatrix, rank
from gfcoh.formal_calculus import FormalForm, MonomialField
from gfcoh.gf_classes import a_class, wronskian_cocycle

d_x = MonomialField.of((0,), 0)
x_dx = MonomialField.of((1,), 0)


def test_one_cochain_differential_example():
    phi = TrivialCochain(1, 1, {(d_x,): 1})
    assert phi.differential()(x_dx, d_x) == 1
    assert phi.differential()(d_x, x_dx) == -1


def test_zero_cochain_with_function_values():
    # (d f)(X) = L_X f with our sign; f = x, X = d_x gives +1
    f = FormCochain(1, 0, lambda T: FormalForm.polynomial(1, {(1,): 1}), "x", 0)
    assert ce_differential(f)(d_x) == FormalForm.constant(1, 1)


def test_weight_zero_slice_examples():
    assert build_weight_zero_slice(1, 1).basis == ((x_dx,),)
    assert build_weight_zero_slice(1, 0).dim == 0
    s3, s2, s4 = (build_weight_zero_slice(1, q) for q in (3, 2, 4))
    assert s3.dim == len(weight_tuples(1, 3, 0))
    assert s3.dim - rank(s3.differential) - rank(s2.differential) == 1


@pytest.mark.parametrize("n,q_max", [(1, 6), (2, 5)])
def test_d_squared_on_every_slice(n, q_max):
    for w in range(-2, 3):
        for q in range(q_max):
            a, b = build_slice(n, q, w, reduced=False), build_slice(n, q + 1, w, reduced=False)
            assert (b.differential @ a.differential).is_zero()


@pytest.mark.parametrize("n,q_max", [(1, 5), (2, 4)])
def test_euler_homotopy_on_nonzero_weights(n, q_max):
    for w in (-2, -1, 1, 2, 3):
        for q in range(1, q_max + 1):
            d_in = build_slice(n, q - 1, w, reduced=False).differential
            d_out = build_slice(n, q, w, reduced=False).differential
            h_in = euler_homotopy_matrix(n, q, w)
            h_out = euler_homotopy_matrix(n, q + 1, w)
            lhs = d_in @ h_in + h_out @ d_out
            assert lhs == SparseMatrix.identity(lhs.rows)


def test_betti_examples():
    assert betti(1, 4).as_list(range(1, 5)) == [0, 0, 1, 0]
    table = betti(2, 6)
    assert table[5] == 2
    assert all(table[q] == 0 for q in (1, 2, 3, 4, 6))
    with pytest.raises(ValueError):
        betti(1, 0)


def test_betti_resource_cap_reports_partial():
    with pytest.raises(ResourceLimitError) as exc:
        betti(2, 6, EngineConfig(max_slice_dim=100))
    part = exc.value.partial
    assert not part.complete
    # H^3 would need the 120-dimensional degree-4 slice
    assert part.dims == {1: 0, 2: 0}


def test_threads_from_environment(monkeypatch):
    monkeypatch.setenv("GF_ENGINE_THREADS", "3")
    assert EngineConfig().worker_count() == 3
    assert betti(1, 4).as_list(range(1, 5)) == [0, 0, 1, 0]


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.randoms(use_true_random=False))
def test_rank_independent_of_basis_order(q, rnd):
    sl = build_weight_zero_slice(2, q)
    m = sl.differential
    rp, cp = list(range(m.rows)), list(range(m.cols))
    rnd.shuffle(rp)
    rnd.shuffle(cp)
    assert rank(m.permuted(rp, cp)) == rank(m)


def test_gl_complex_examples():
    assert gl_complex_betti(1, 0).dims == {0: 1, 1: 1}
    assert gl_complex_betti(2, 0).dims == {0: 1, 1: 1, 2: 0, 3: 1, 4: 1}
    # gl(1) acts on the dual line by a nonzero character: no cohomology
    assert gl_complex_betti(1, 1).dims == {0: 0, 1: 0}
    dims = gl_complex_betti(2, 0).dims
    assert [dims[q] for q in range(5)] == [dims[4 - q] for q in range(5)]


def test_is_cocycle_examples():
    ok, cert = is_cocycle(a_class(1, 1).cochain)
    assert ok and cert.stabilized
    rng = random.Random(5)
    src = build_weight_zero_slice(2, 1)
    psi = src.cochain([rng.randint(1, 4) for _ in range(src.dim)])
    assert is_cocycle(psi.differential())[0]
    bad = TrivialCochain(1, 1, {(x_dx,): 1, (d_x,): 1})
    ok, cert = is_cocycle(bad)
    assert not ok and cert.witness is not None


def test_coboundary_witness_examples():
    sl = build_weight_zero_slice(1, 2)
    assert not coboundary_witness(TrivialCochain(1, 3), sl)
    assert coboundary_witness(TrivialCochain(1, 3), sl) is not None
    assert coboundary_witness(wronskian_cocycle(), sl) is None
    rng = random.Random(11)
    src = build_weight_zero_slice(2, 3)
    psi = src.cochain([rng.randint(-2, 2) for _ in range(src.dim)])
    w = coboundary_witness(psi.differential(), src)
    assert w is not None and w.differential() == psi.differential()
    with pytest.raises(ValueError):
        coboundary_witness(TrivialCochain(1, 2), sl)


def test_include_trivial_is_chain_map():
    W = wronskian_cocycle()
    dW = ce_differential(include_trivial(W))
    for T in weight_tuples(1, 4, 0):
        assert not dW.on_sorted(T)
