import pytest

from closed_form_oracle import coefficient, closed_form_ratios, field
from gfcoh.ce_engine import TrivialCochain
from gfcoh.formal_calculus import MonomialField
from gfcoh.gf_classes import phi_on_slice, realize, wronskian_cocycle
from gfcoh.local_descent import (
    NotTranslationInvariant,
    density_coboundary,
    delta_integrand,
    descent_solution,
    equivalent_mod_divergence,
    euler_operator,
    evaluate_on_fields,
    is_total_divergence,
    j_pullback,
    model,
    reference_density,
    verify_descent_inputs,
    verify_descent_polynomial,
)


@pytest.fixture(scope="module")
def wronskian_descent():
    return descent_solution(wronskian_cocycle())


def _field(p, q=0, ghost=0):
    return field(p, q, ghost)


def test_pullback_of_first_derivative():
    M = model(1)
    phi = TrivialCochain(1, 1, {(MonomialField.of((1,), 0),): 1})
    assert j_pullback(phi) == M.u(0, (), (1,))
    # evaluated on a(z, zbar) d_z: d_z a at the base point
    val = evaluate_on_fields(j_pullback(phi), [_field(3, 2)])
    assert val == coefficient(M, 2, 2) * 3
    # a pure dzbar term in that slot contributes nothing
    assert not evaluate_on_fields(j_pullback(phi), [_field(3, 2, ghost=1)])


def test_wronskian_descent_matches_closed_form(wronskian_descent):
    sol = wronskian_descent
    assert sorted(sol.components) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert closed_form_ratios(sol) == {"0,0": {1}, "0,1": {1}, "1,1": {1}}


def test_descent_equations_polynomial(wronskian_descent):
    cert = verify_descent_polynomial(wronskian_descent)
    assert cert.holds and all(cert.checks.values())


def test_descent_equations_on_inputs_small(wronskian_descent):
    cert = verify_descent_inputs(wronskian_descent, jet_bound=2, margin=0)
    assert cert.holds and cert.stabilized and cert.inputs_checked > 1000


def test_descent_input_check_detects_corruption(wronskian_descent):
    sol = descent_solution(wronskian_cocycle())
    sol.components[(1, 1)] = sol.components[(1, 1)] * 2
    assert not verify_descent_polynomial(sol).holds
    cert = verify_descent_inputs(sol, jet_bound=2, margin=0)
    assert not cert.holds and not cert.checks["cartan(1,1)"]


def test_descent_of_zero_and_non_closed():
    assert not descent_solution(TrivialCochain(1, 3)).total
    with pytest.raises(ValueError):
        descent_solution(TrivialCochain(1, 1, {(MonomialField.of((0,), 0),): 1}))


def test_eta_operators():
    M = model(2)
    u = M.u
    p = u(0) * u(1, (), (1, 0)) * u(0, (), (0, 2)) + u(1, (), (1, 1)) * u(0, (0,), (1, 0))
    # eta on a 1-cochain returns its value on the constant field
    assert M.eta(0, u(0)) == M.alg.const(1)
    assert not M.eta(1, u(0, (), (1, 0)))
    for l in range(2):
        assert not M.eta_bar(l, M.eta_bar(l, p))
        assert not M.eta(l, M.eta(l, p))
        for m in range(2):
            assert M.eta(l, M.eta(m, p)) == -M.eta(m, M.eta(l, p))
            assert M.eta_bar(l, M.eta_bar(m, p)) == -M.eta_bar(m, M.eta_bar(l, p))
            assert M.eta(l, M.eta_bar(m, p)) == -M.eta_bar(m, M.eta(l, p))
    # dz_i dz_j eta_i eta_j summed is symmetric under the swap
    s1 = M.dz(0) * M.dz(1) * M.eta(0, M.eta(1, p))
    s2 = M.dz(1) * M.dz(0) * M.eta(1, M.eta(0, p))
    assert s1 == s2
    assert not M.eta_bar(0, M.alg.const(3))


def test_commutators_with_differential():
    for n in (1, 2):
        M = model(n)
        z = (0,) * n
        samples = [M.u(0, (), (1,) + z[1:]), M.u(n - 1, (), z, (1,) + z[1:]) * M.u(0),
                   M.u(0, (0,), (2,) + z[1:]) * M.u(n - 1, (), z)]
        for p in samples:
            assert not M.Q(M.Q(p))
            for l in range(n):
                assert M.d_T(M.eta(l, p)) + M.eta(l, M.d_T(p)) == M.D(l, p)
                assert M.d_T(M.eta_bar(l, p)) + M.eta_bar(l, M.d_T(p)) == M.Dbar(l, p)


def test_pullback_is_chain_map():
    import random
    from gfcoh.ce_engine import weight_tuples
    rng = random.Random(8)
    for n in (1, 2):
        M = model(n)
        for q in (1, 2):
            for w in (-1, 0, 1):
                phi = TrivialCochain(n, q, {T: rng.randint(-3, 3) for T in weight_tuples(n, q, w)})
                assert j_pullback(phi.differential()) == M.Q(j_pullback(phi), "ce")


def test_is_total_divergence_examples():
    M = model(1)
    u = M.u
    F = u(0, (), (1,)) * u(0, (0,), (2,))
    assert is_total_divergence(1, M.D(0, F))
    assert not is_total_divergence(1, u(0) * u(0, (0,)))
    E = euler_operator(1, u(0) * u(0, (0,)))
    assert E[(0, ())] == u(0, (0,)) and E[(0, (0,))] == u(0)
    with pytest.raises(NotTranslationInvariant):
        is_total_divergence(1, M.alg.gen((5, 0)) * u(0))


def test_jacobian_density_n1(wronskian_descent):
    JdJ = reference_density(1, "J dJ")
    assert not is_total_divergence(1, JdJ)
    assert is_total_divergence(1, density_coboundary(1, JdJ))
    L = delta_integrand(wronskian_descent)
    assert equivalent_mod_divergence(1, L, JdJ) == -1
    assert is_total_divergence(1, density_coboundary(1, L))


@pytest.mark.parametrize("cls,kind,scalar", [("a1*t2", "TrJ Tr(dJ dJ)", -1), ("a1*t1^2", "TrJ TrdJ TrdJ", 1)])
def test_two_dimensional_densities(cls, kind, scalar):
    sol = descent_solution(phi_on_slice(realize(cls, 2), 5))
    assert verify_descent_polynomial(sol).holds
    L = delta_integrand(sol)
    ref = reference_density(2, kind)
    assert equivalent_mod_divergence(2, L, ref) == scalar
    assert not is_total_divergence(2, ref)
    assert is_total_divergence(2, density_coboundary(2, L))
